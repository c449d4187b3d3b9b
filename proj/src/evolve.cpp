#include "trion/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>

#include "trion/error.hpp"

namespace trion {

namespace {

void check_alpha(int alpha) {
  if (alpha < 1 || alpha > kTrionStates) {
    throw DomainError("state index must be in 1..8, got " + std::to_string(alpha));
  }
}

double norm2(const Amplitudes& a) {
  double s = 0.0;
  for (const Complex& c : a) s += std::norm(c);
  return s;
}

bool finite(const Amplitudes& a) {
  for (const Complex& c : a)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

struct StepPlan {
  long long n = 0;
  double h = 0.0;
};

StepPlan plan_steps(const ModelParams& params, double t0, double t1, const IntegratorConfig& cfg) {
  const double nominal = params.period() / cfg.steps_per_period;
  const double n = std::ceil((t1 - t0) / nominal - 1e-9);
  StepPlan plan;
  plan.n = std::max(1LL, static_cast<long long>(n));
  plan.h = (t1 - t0) / static_cast<double>(plan.n);
  return plan;
}

// Advances every column of `cols` by n RK4 steps of size h from t0. After
// each step k (1-based) `on_step(k, t)` is invoked with the updated columns.
template <class OnStep>
void rk4(const ModelParams& params, std::span<Amplitudes> cols, double t0, const StepPlan& plan, OnStep on_step) {
  const Complex minus_i(0.0, -1.0);
  Amplitudes k1, k2, k3, k4, tmp;
  for (long long k = 0; k < plan.n; ++k) {
    const double t = t0 + static_cast<double>(k) * plan.h;
    const double h = plan.h;
    const double f0 = drive_field(params, t);
    const double fm = drive_field(params, t + 0.5 * h);
    const double f1 = drive_field(params, t + h);
    for (Amplitudes& psi : cols) {
      apply_hamiltonian_field(params, f0, psi, k1);
      for (int i = 0; i < kTrionStates; ++i) {
        k1[i] *= minus_i;
        tmp[i] = psi[i] + (0.5 * h) * k1[i];
      }
      apply_hamiltonian_field(params, fm, tmp, k2);
      for (int i = 0; i < kTrionStates; ++i) {
        k2[i] *= minus_i;
        tmp[i] = psi[i] + (0.5 * h) * k2[i];
      }
      apply_hamiltonian_field(params, fm, tmp, k3);
      for (int i = 0; i < kTrionStates; ++i) {
        k3[i] *= minus_i;
        tmp[i] = psi[i] + h * k3[i];
      }
      apply_hamiltonian_field(params, f1, tmp, k4);
      for (int i = 0; i < kTrionStates; ++i) {
        k4[i] *= minus_i;
        psi[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    on_step(k + 1, t0 + static_cast<double>(k + 1) * plan.h);
  }
}

void require_finite(std::span<const Amplitudes> cols, double t) {
  for (const Amplitudes& c : cols) {
    if (!finite(c)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", t);
      throw NumericalFailure(std::string("non-finite amplitude at t = ") + buf);
    }
  }
}

ComplexMatrix columns_to_matrix(std::span<const Amplitudes> cols) {
  ComplexMatrix m(kTrionStates);
  for (int c = 0; c < kTrionStates; ++c)
    for (int r = 0; r < kTrionStates; ++r) m(r, c) = cols[c][r];
  return m;
}

std::array<Amplitudes, kTrionStates> identity_columns() {
  std::array<Amplitudes, kTrionStates> cols{};
  for (int c = 0; c < kTrionStates; ++c) cols[c][c] = 1.0;
  return cols;
}

void check_unitary(const ComplexMatrix& u, double t) {
  const double defect = unitarity_defect(u);
  if (!(defect <= 1e-6)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "propagator lost unitarity (defect %.3g) at t = %.17g", defect, t);
    throw NumericalFailure(buf);
  }
}

}  // namespace

StateVector::StateVector() { amps_[0] = 1.0; }

StateVector::StateVector(const Amplitudes& amplitudes) : amps_(amplitudes) {
  if (!finite(amps_)) throw DomainError("state amplitudes must be finite");
  const double n = norm2(amps_);
  if (std::abs(n - 1.0) > kStateNormTolerance) {
    throw DomainError("state vector is not normalized (sum |c|^2 = " + std::to_string(n) + ")");
  }
}

StateVector StateVector::normalized(const Amplitudes& amplitudes) {
  if (!finite(amplitudes)) throw DomainError("state amplitudes must be finite");
  const double n = std::sqrt(norm2(amplitudes));
  if (!(n > 0.0)) throw DomainError("cannot normalize the zero vector");
  Amplitudes a = amplitudes;
  for (Complex& c : a) c /= n;
  return StateVector(a, Unchecked{});
}

StateVector StateVector::raw(const Amplitudes& amplitudes) { return StateVector(amplitudes, Unchecked{}); }

StateVector StateVector::basis(int alpha) {
  check_alpha(alpha);
  Amplitudes a{};
  a[alpha - 1] = 1.0;
  return StateVector(a, Unchecked{});
}

Complex StateVector::amplitude(int alpha) const {
  check_alpha(alpha);
  return amps_[alpha - 1];
}

double StateVector::population(int alpha) const { return std::norm(amplitude(alpha)); }

double StateVector::norm_squared() const { return norm2(amps_); }

void IntegratorConfig::validate() const {
  if (steps_per_period < 64) throw DomainError("steps_per_period must be at least 64");
  if (sample_stride < 1 || steps_per_period % sample_stride != 0) {
    throw DomainError("sample_stride must be a positive divisor of steps_per_period");
  }
}

double Trajectory::max_norm_drift() const {
  double drift = 0.0;
  for (const StateVector& s : states) drift = std::max(drift, std::abs(s.norm_squared() - 1.0));
  return drift;
}

Trajectory integrate(const ModelParams& params, const StateVector& psi0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(t1 > t0)) throw DomainError("integrate requires t1 > t0");
  const StepPlan plan = plan_steps(params, t0, t1, cfg);

  Trajectory traj;
  traj.step = plan.h;
  const std::size_t expected = static_cast<std::size_t>(plan.n / cfg.sample_stride) + 2;
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.times.push_back(t0);
  traj.states.push_back(psi0);

  std::array<Amplitudes, 1> col{psi0.amplitudes()};
  rk4(params, col, t0, plan, [&](long long k, double t) {
    if (k % cfg.sample_stride != 0 && k != plan.n) return;
    require_finite(col, t);
    traj.times.push_back(k == plan.n ? t1 : t);
    traj.states.push_back(StateVector::raw(col[0]));
  });
  return traj;
}

Amplitudes advance(const ModelParams& params, const Amplitudes& psi, double t0, double t1,
                   const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (t1 == t0) return psi;
  if (!(t1 > t0)) throw DomainError("advance requires t1 >= t0");
  std::array<Amplitudes, 1> col{psi};
  const StepPlan plan = plan_steps(params, t0, t1, cfg);
  rk4(params, col, t0, plan, [](long long, double) {});
  require_finite(col, t1);
  return col[0];
}

ComplexMatrix propagator(const ModelParams& params, double t0, double t1, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (t1 == t0) return ComplexMatrix::identity(kTrionStates);
  if (!(t1 > t0)) throw DomainError("propagator requires t1 >= t0");
  auto cols = identity_columns();
  rk4(params, cols, t0, plan_steps(params, t0, t1, cfg), [](long long, double) {});
  require_finite(cols, t1);
  ComplexMatrix u = columns_to_matrix(cols);
  check_unitary(u, t1);
  return u;
}

double min_survival(const ModelParams& params, int alpha, int n_periods, const IntegratorConfig& cfg) {
  check_alpha(alpha);
  if (n_periods < 1) throw DomainError("n_periods must be at least 1");
  const Trajectory traj =
      integrate(params, StateVector::basis(alpha), 0.0, n_periods * params.period(), cfg);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < traj.states.size(); ++i) best = std::min(best, traj.states[i].population(alpha));
  return best;
}

PeriodPropagator sample_period_propagator(const ModelParams& params, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (cfg.steps_per_period % 2 != 0) throw DomainError("steps_per_period must be even to sample U(T/2, 0)");
  PeriodPropagator out;
  out.period = params.period();
  const StepPlan plan{cfg.steps_per_period, out.period / cfg.steps_per_period};
  const long long half_step = cfg.steps_per_period / 2;
  auto cols = identity_columns();
  out.times.reserve(static_cast<std::size_t>(cfg.steps_per_period / cfg.sample_stride));
  out.samples.reserve(out.times.capacity());
  rk4(params, cols, 0.0, plan, [&](long long k, double t) {
    if (k == half_step) {
      require_finite(cols, t);
      out.half = columns_to_matrix(cols);
    }
    if (k % cfg.sample_stride != 0) return;
    require_finite(cols, t);
    out.times.push_back(k == plan.n ? out.period : t);
    out.samples.push_back(columns_to_matrix(cols));
  });
  check_unitary(out.half, 0.5 * out.period);
  check_unitary(out.monodromy(), out.period);
  return out;
}

double min_survival_floquet(const PeriodPropagator& prop, int alpha, int n_periods) {
  check_alpha(alpha);
  if (n_periods < 1) throw DomainError("n_periods must be at least 1");
  if (prop.samples.empty()) throw DomainError("period propagator has no samples");
  std::array<Complex, kTrionStates> v{};
  v[alpha - 1] = 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 0; n < n_periods; ++n) {
    // Only row alpha of U(t_j, 0) is needed for the survival amplitude.
    for (const ComplexMatrix& u : prop.samples) {
      Complex c = 0.0;
      for (int j = 0; j < kTrionStates; ++j) c += u(alpha - 1, j) * v[j];
      best = std::min(best, std::norm(c));
    }
    v = [&] {
      std::array<Complex, kTrionStates> next{};
      const ComplexMatrix& m = prop.monodromy();
      for (int r = 0; r < kTrionStates; ++r)
        for (int j = 0; j < kTrionStates; ++j) next[r] += m(r, j) * v[j];
      return next;
    }();
  }
  return best;
}

}  // namespace trion
