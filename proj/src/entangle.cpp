#include "trion/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "trion/error.hpp"
#include "trion/parallel.hpp"

namespace trion {

namespace {

constexpr double kDensityTol = 1e-10;
constexpr double kEigenTol = 1e-8;

// Diagonal signs of sigma_y x sigma_y = antidiag(-1, 1, 1, -1).
constexpr std::array<int, 4> kFlipSign{-1, 1, 1, -1};

template <class Real>
BasicMatrix<Real> flip(const BasicMatrix<Real>& rho) {
  BasicMatrix<Real> out(4);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) out(j, k) = Real(kFlipSign[j] * kFlipSign[k]) * std::conj(rho(3 - j, 3 - k));
  return out;
}

void check_norm(double n, const char* what) {
  if (std::abs(n - 1.0) > kStateNormTolerance) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s: populations sum to %.12g, expected 1", what, n);
    throw DomainError(buf);
  }
}

}  // namespace

DensityMatrix4::DensityMatrix4(const ComplexMatrix& m) : m_(m) {
  if (m.dim() != 4) throw DomainError("density matrix must be 4x4");
  if (!m.all_finite()) throw DomainError("density matrix must be finite");
  if (frobenius_norm(m - adjoint(m)) > kDensityTol) throw DomainError("density matrix is not Hermitian");
  if (std::abs(trace(m) - 1.0) > kDensityTol) throw DomainError("density matrix trace differs from 1");
  const HermitianEigen<double> eig = eig_hermitian(m);
  if (eig.values.front() < -kDensityTol) throw DomainError("density matrix has a negative eigenvalue");
}

DensityMatrix4 reduce_over_hole(const StateVector& psi) {
  const Amplitudes& c = psi.amplitudes();
  const double n = psi.norm_squared();
  if (!(n > 0.0)) throw DomainError("cannot reduce the zero vector");
  ComplexMatrix rho(4);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) rho(j, k) = (c[2 * j] * std::conj(c[2 * k]) + c[2 * j + 1] * std::conj(c[2 * k + 1])) / n;
  // Exact Hermiticity, independent of rounding in the products above.
  for (int j = 0; j < 4; ++j) {
    rho(j, j) = rho(j, j).real();
    for (int k = j + 1; k < 4; ++k) rho(k, j) = std::conj(rho(j, k));
  }
  return DensityMatrix4(rho);
}

ComplexMatrix spin_flip(const ComplexMatrix& rho) {
  if (rho.dim() != 4) throw DomainError("spin_flip expects a 4x4 matrix");
  return flip(rho);
}

ComplexMatrix spin_flip(const DensityMatrix4& rho) { return flip(rho.matrix()); }

double concurrence(const DensityMatrix4& rho) {
  // Eigenvalues of rho * rho~ that vanish exactly come out at the rounding
  // level, and their square roots at its square root; extended precision
  // keeps that contribution below 1e-9.
  const ExtendedMatrix r = rho.matrix().cast<long double>();
  const ExtendedMatrix product = matmul(r, flip(r));
  const EigenPairs<long double> eig = eig_general(product, false);
  std::array<long double, 4> lambda{};
  for (int i = 0; i < 4; ++i) {
    const std::complex<long double> v = eig.values[i];
    if (std::abs(v.imag()) > kEigenTol || v.real() < -kEigenTol) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "concurrence: unphysical eigenvalue %.3Lg%+.3Lgi of rho*rho~", v.real(), v.imag());
      throw NumericalFailure(buf);
    }
    lambda[i] = std::sqrt(std::max<long double>(v.real(), 0));
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  const long double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
  return static_cast<double>(std::clamp<long double>(c, 0, 1));
}

double concurrence(const StateVector& psi) { return concurrence(reduce_over_hole(psi)); }

double concurrence_three_state(Complex c1, Complex c3, Complex c5) {
  check_norm(std::norm(c1) + std::norm(c3) + std::norm(c5), "concurrence_three_state");
  return pair_concurrence_estimate(c3, c5);
}

double concurrence_double_slit(Complex c1, Complex c2, Complex c7, Complex c8) {
  check_norm(std::norm(c1) + std::norm(c2) + std::norm(c7) + std::norm(c8), "concurrence_double_slit");
  return double_slit_estimate(c1, c2, c7, c8);
}

double pair_concurrence_estimate(Complex a, Complex b) { return 2.0 * std::abs(a) * std::abs(b); }

double double_slit_estimate(Complex c1, Complex c2, Complex c7, Complex c8) {
  const Complex x = std::conj(c1) * c7 + std::conj(c2) * c8;
  const double a = (std::norm(c1) + std::norm(c2)) * (std::norm(c7) + std::norm(c8)) + std::norm(x);
  const double b = std::norm(c7 + c8) * x.real();
  const double c = std::norm(c1 + c2) * x.real();
  return std::sqrt(a + std::sqrt(std::max(b * c, 0.0)));
}

BellTarget bell_target(BellLabel label) {
  Amplitudes a{};
  const double s = 1.0 / std::sqrt(2.0);
  switch (label) {
    case BellLabel::eta:
      a[2] = s;
      a[4] = s;
      break;
    case BellLabel::alpha:
      a[0] = s;
      a[6] = s;
      break;
    case BellLabel::beta:
      a[1] = s;
      a[7] = s;
      break;
  }
  return BellTarget{label, StateVector::normalized(a)};
}

std::optional<BellLabel> parse_bell_label(const std::string& name) {
  if (name == "eta" || name == "psi_bell") return BellLabel::eta;
  if (name == "alpha") return BellLabel::alpha;
  if (name == "beta") return BellLabel::beta;
  return std::nullopt;
}

const char* to_string(BellLabel label) {
  switch (label) {
    case BellLabel::eta: return "eta";
    case BellLabel::alpha: return "alpha";
    case BellLabel::beta: return "beta";
  }
  return "eta";
}

double bell_overlap(const StateVector& psi, const BellTarget& target) {
  Complex s = 0.0;
  for (int i = 0; i < kTrionStates; ++i) s += std::conj(target.vector.amplitudes()[i]) * psi.amplitudes()[i];
  return std::norm(s);
}

FilterSpec FilterSpec::zero(std::initializer_list<int> states, FilterMode mode) {
  FilterSpec f;
  f.mode = mode;
  for (int a : states) {
    if (a < 1 || a > kTrionStates) throw DomainError("filter state must be in 1..8");
    f.zeroed.set(static_cast<std::size_t>(a - 1));
  }
  f.validate();
  return f;
}

void FilterSpec::validate() const {
  if (zeroed.all()) throw DomainError("filter must leave at least one amplitude");
}

StateVector filtered_state(const StateVector& psi, const FilterSpec& spec) {
  spec.validate();
  Amplitudes c = psi.amplitudes();
  if (spec.mode == FilterMode::group_weighted) {
    double odd = 0.0, even = 0.0;
    for (int i = 0; i < kTrionStates; ++i) (i % 2 == 0 ? odd : even) += std::norm(c[i]);
    odd = std::sqrt(odd);
    even = std::sqrt(even);
    for (int i = 0; i < kTrionStates; ++i) c[i] *= (i % 2 == 0 ? odd : even);
  }
  for (int i = 0; i < kTrionStates; ++i)
    if (spec.zeroed.test(static_cast<std::size_t>(i))) c[i] = 0.0;
  double n = 0.0;
  for (const Complex& x : c) n += std::norm(x);
  if (!(n > 0.0)) throw DomainError("filter removed every nonzero amplitude");
  return StateVector::normalized(c);
}

std::vector<double> sliding_max(const std::vector<double>& values, int window) {
  if (window < 1) throw DomainError("sliding_max window must be positive");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
  const std::ptrdiff_t left = (window - 1) / 2;
  const std::ptrdiff_t right = window / 2;
  std::vector<double> out(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - left);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + right);
    out[static_cast<std::size_t>(i)] = *std::max_element(values.begin() + lo, values.begin() + hi + 1);
  }
  return out;
}

int count_local_maxima(const std::vector<double>& values) {
  int count = 0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] >= values[i + 1]) ++count;
  return count;
}

EntangleSeries entangle_series(const Trajectory& traj, const EntangleRequest& request, int workers) {
  if (request.analytic == AnalyticForm::pair) {
    for (int a : {request.pair_i, request.pair_j})
      if (a < 1 || a > kTrionStates) throw DomainError("analytic pair states must be in 1..8");
  }
  if (request.filter) request.filter->validate();
  const BellTarget target = bell_target(request.target);

  const std::size_t n = traj.states.size();
  EntangleSeries s;
  s.times = traj.times;
  s.concurrence_full.assign(n, 0.0);
  s.concurrence_analytic.assign(n, 0.0);
  s.overlap.assign(n, 0.0);

  parallel_for(n, resolve_workers(workers), [&](std::size_t i) {
    StateVector psi = traj.states[i];
    s.overlap[i] = bell_overlap(psi, target) / psi.norm_squared();
    if (request.filter) {
      const Amplitudes& raw = psi.amplitudes();
      bool any = false;
      for (int a = 0; a < kTrionStates; ++a)
        if (!request.filter->zeroed.test(static_cast<std::size_t>(a)) && std::norm(raw[a]) > 0.0) any = true;
      if (!any) return;
      psi = filtered_state(psi, *request.filter);
    }
    const Amplitudes& c = psi.amplitudes();
    s.concurrence_full[i] = concurrence(psi);
    s.concurrence_analytic[i] = request.analytic == AnalyticForm::pair
                                    ? pair_concurrence_estimate(c[request.pair_i - 1], c[request.pair_j - 1])
                                    : double_slit_estimate(c[0], c[1], c[6], c[7]);
  });
  s.overlap_envelope = sliding_max(s.overlap, request.window);
  return s;
}

}  // namespace trion
