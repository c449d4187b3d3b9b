#include "trion/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>

#include "trion/error.hpp"
#include "trion/parallel.hpp"

namespace trion {

namespace {

constexpr double kClusterTol = 1e-6;
constexpr double kParityTol = 1e-6;
constexpr double kAmbiguityTol = 1e-6;
// Grid minima shallower than this (relative to omega) are integrator noise.
constexpr double kDipFloor = 1e-9;

Complex inner(const Amplitudes& a, const Amplitudes& b) {
  Complex s = 0.0;
  for (int i = 0; i < kTrionStates; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

std::string phi_context(double phi, const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "phi = %.17g: ", phi);
  return buf + std::string(what);
}

// Eigenvectors of a unitary matrix belonging to (nearly) equal eigenvalues
// come out of back-substitution nearly parallel; re-orthonormalize them.
void orthonormalize_clusters(const std::vector<Complex>& values, std::vector<Amplitudes>& vecs) {
  const std::size_t n = values.size();
  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> cluster{i};
    for (std::size_t j = i + 1; j < n; ++j)
      if (!done[j] && std::abs(values[j] - values[i]) < kClusterTol) cluster.push_back(j);
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      Amplitudes& v = vecs[cluster[c]];
      for (std::size_t p = 0; p < c; ++p) {
        const Amplitudes& u = vecs[cluster[p]];
        const Complex proj = inner(u, v);
        for (int k = 0; k < kTrionStates; ++k) v[k] -= proj * u[k];
      }
      double nrm = 0.0;
      for (const Complex& x : v) nrm += std::norm(x);
      nrm = std::sqrt(nrm);
      if (!(nrm > 1e-8)) throw NumericalFailure("Floquet modes of a degenerate cluster are linearly dependent");
      for (Complex& x : v) x /= nrm;
      done[cluster[c]] = true;
    }
  }
}

ModelParams at_phi(ModelParams p, double phi) {
  p.phi = phi;
  return p;
}

IntegratorConfig stroboscopic(IntegratorConfig cfg) {
  cfg.sample_stride = cfg.steps_per_period;
  return cfg;
}

// Parity labels flip when a quasienergy wraps across the zone edge, so a
// track keeps its label only when its quasienergy moved less than omega/2.
bool parity_compatible(Parity prev, double eps_prev, Parity cur, double eps_cur, double omega) {
  if (prev == Parity::unresolved || cur == Parity::unresolved) return true;
  const bool wrapped = std::abs(eps_cur - eps_prev) > 0.5 * omega;
  return (prev == cur) != wrapped;
}

void match_tracks(SweepResult& r) {
  const std::size_t n = r.phis.size();
  r.tracks.assign(n, {});
  r.track_parities.assign(n, {});
  r.slots.assign(n, {});
  r.unresolved.assign(n, false);
  const double omega = r.params.omega;

  std::iota(r.slots[0].begin(), r.slots[0].end(), 0);
  for (std::size_t j = 1; j < n; ++j) {
    const FloquetSpectrum& prev = r.spectra[j - 1];
    const FloquetSpectrum& cur = r.spectra[j];
    std::array<std::array<double, kTrionStates>, kTrionStates> overlap{};
    for (int k = 0; k < kTrionStates; ++k)
      for (int s = 0; s < kTrionStates; ++s)
        overlap[k][s] = std::abs(inner(prev.modes[r.slots[j - 1][k]], cur.modes[s]));

    bool ambiguous = false;
    for (int k = 0; k < kTrionStates; ++k) {
      std::array<double, kTrionStates> row = overlap[k];
      std::sort(row.begin(), row.end(), std::greater<>());
      if (row[0] - row[1] < kAmbiguityTol) ambiguous = true;
    }

    std::vector<std::tuple<double, int, int>> pairs;
    for (int k = 0; k < kTrionStates; ++k)
      for (int s = 0; s < kTrionStates; ++s) pairs.emplace_back(overlap[k][s], k, s);
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });

    std::array<int, kTrionStates> assign;
    assign.fill(-1);
    std::array<bool, kTrionStates> taken{};
    for (bool enforce_parity : {true, false}) {
      for (const auto& [ov, k, s] : pairs) {
        if (assign[k] >= 0 || taken[s]) continue;
        const int ps = r.slots[j - 1][k];
        if (enforce_parity &&
            !parity_compatible(prev.parities[ps], prev.quasienergies[ps], cur.parities[s], cur.quasienergies[s], omega)) {
          continue;
        }
        if (!enforce_parity) ambiguous = true;
        assign[k] = s;
        taken[s] = true;
      }
    }
    r.slots[j] = assign;
    r.unresolved[j] = ambiguous;
  }

  for (std::size_t j = 0; j < n; ++j)
    for (int k = 0; k < kTrionStates; ++k) {
      r.tracks[j][k] = r.spectra[j].quasienergies[r.slots[j][k]];
      r.track_parities[j][k] = r.spectra[j].parities[r.slots[j][k]];
    }
}

struct PairProbe {
  double gap = 0.0;
  bool opposite = false;
  Amplitudes mode_a{};
  Amplitudes mode_b{};
};

// Spectrum at phi from the half-period map only; the two modes closest to
// the references are compared.
PairProbe probe_pair(const ModelParams& params, const IntegratorConfig& cfg, double phi, const Amplitudes& ref_a,
                     const Amplitudes& ref_b) {
  const ModelParams p = at_phi(params, phi);
  const ComplexMatrix half = propagator(p, 0.0, 0.5 * p.period(), cfg);
  const FloquetSpectrum spec = spectrum_from_half_period(half, p.omega);

  std::array<double, kTrionStates> oa{}, ob{};
  for (int s = 0; s < kTrionStates; ++s) {
    oa[s] = std::abs(inner(ref_a, spec.modes[s]));
    ob[s] = std::abs(inner(ref_b, spec.modes[s]));
  }
  const int best_a = static_cast<int>(std::max_element(oa.begin(), oa.end()) - oa.begin());
  const int best_b = static_cast<int>(std::max_element(ob.begin(), ob.end()) - ob.begin());
  int sa = best_a;
  int sb = best_b;
  if (sa == sb) {
    // Give the contested slot to the stronger claim, the other reference
    // takes its next best.
    auto second = [](const std::array<double, kTrionStates>& o, int skip) {
      int best = -1;
      for (int s = 0; s < kTrionStates; ++s)
        if (s != skip && (best < 0 || o[s] > o[best])) best = s;
      return best;
    };
    if (oa[sa] >= ob[sb]) {
      sb = second(ob, sa);
    } else {
      sa = second(oa, sb);
    }
  }
  PairProbe out;
  out.gap = zone_distance(spec.quasienergies[sa], spec.quasienergies[sb], p.omega);
  out.opposite = (spec.multipliers[sa] * std::conj(spec.multipliers[sb])).real() < 0.0;
  out.mode_a = spec.modes[sa];
  out.mode_b = spec.modes[sb];
  return out;
}

}  // namespace

const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::unresolved: return "unresolved";
  }
  return "unresolved";
}

int parity_sign(Parity p) {
  switch (p) {
    case Parity::even: return 1;
    case Parity::odd: return -1;
    case Parity::unresolved: return 0;
  }
  return 0;
}

const char* to_string(CrossingKind k) { return k == CrossingKind::exact ? "exact" : "avoided"; }

double fold_to_zone(double eps, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("fold_to_zone requires omega > 0");
  double r = eps - omega * std::floor(eps / omega + 0.5);
  if (r >= 0.5 * omega) r -= omega;
  if (r < -0.5 * omega) r += omega;
  return r;
}

double zone_distance(double a, double b, double omega) {
  const double d = std::fmod(std::abs(a - b), omega);
  return std::min(d, omega - d);
}

FloquetSpectrum spectrum_from_half_period(const ComplexMatrix& half, double omega) {
  if (half.dim() != kTrionStates) throw DomainError("half-period propagator must be 8x8");
  const double period = 2.0 * std::numbers::pi / omega;
  const ComplexMatrix s = matmul(parity_operator(), half);
  const EigenPairs<double> eig = eig_general(s, true);

  std::vector<Amplitudes> vecs(kTrionStates);
  for (int i = 0; i < kTrionStates; ++i) std::copy(eig.vectors[i].begin(), eig.vectors[i].end(), vecs[i].begin());
  orthonormalize_clusters(eig.values, vecs);

  struct Entry {
    double eps;
    Complex mu;
    Parity parity;
    Amplitudes mode;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < kTrionStates; ++i) {
    const Complex mu = eig.values[i];
    const double eps = fold_to_zone(-2.0 * std::arg(mu) / period, omega);
    const Complex sign = mu * std::polar(1.0, 0.5 * eps * period);
    Parity parity = Parity::unresolved;
    if (std::abs(sign - 1.0) < kParityTol) parity = Parity::even;
    else if (std::abs(sign + 1.0) < kParityTol) parity = Parity::odd;
    entries.push_back({eps, mu, parity, vecs[i]});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.eps < b.eps; });

  FloquetSpectrum out;
  out.omega = omega;
  for (int i = 0; i < kTrionStates; ++i) {
    out.quasienergies[i] = entries[i].eps;
    out.multipliers[i] = entries[i].mu;
    out.parities[i] = entries[i].parity;
    out.modes[i] = entries[i].mode;
  }
  return out;
}

FloquetSpectrum spectrum_from_propagators(const ComplexMatrix& half, const ComplexMatrix& full, double omega) {
  const ComplexMatrix s = matmul(parity_operator(), half);
  const double mismatch = frobenius_norm(matmul(s, s) - full);
  if (!(mismatch <= 1e-5)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "half-period map does not square to the monodromy (mismatch %.3g)", mismatch);
    throw NumericalFailure(buf);
  }
  return spectrum_from_half_period(half, omega);
}

FloquetSpectrum quasienergies(const ModelParams& params, const IntegratorConfig& cfg) {
  const PeriodPropagator pp = sample_period_propagator(params, stroboscopic(cfg));
  return spectrum_from_propagators(pp.half, pp.monodromy(), params.omega);
}

SweepResult sweep_quasienergies(const ModelParams& params, const SweepRequest& request, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (request.n_points < 2) throw DomainError("sweep needs at least 2 points");
  if (!std::isfinite(request.phi_min) || !std::isfinite(request.phi_max) || request.phi_min > request.phi_max) {
    throw DomainError("sweep range must satisfy phi_min <= phi_max");
  }
  if (request.phi_min < 0.0) throw DomainError("sweep range must be non-negative");
  if (!request.pmin_states.empty() && request.n_periods < 1) throw DomainError("n_periods must be at least 1");
  for (int a : request.pmin_states)
    if (a < 1 || a > kTrionStates) throw DomainError("pmin state must be in 1..8");

  SweepResult r;
  r.params = params;
  r.cfg = cfg;
  r.pmin_states = request.pmin_states;
  const auto n = static_cast<std::size_t>(request.n_points);
  r.phis.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(n - 1);
    r.phis[j] = j + 1 == n ? request.phi_max : request.phi_min + (request.phi_max - request.phi_min) * frac;
  }
  r.spectra.resize(n);
  r.pmin.assign(request.pmin_states.size(), std::vector<double>(n, 0.0));

  const bool want_pmin = !request.pmin_states.empty();
  parallel_for(n, resolve_workers(request.workers), [&](std::size_t j) {
    const ModelParams p = at_phi(params, r.phis[j]);
    try {
      const PeriodPropagator pp = sample_period_propagator(p, want_pmin ? cfg : stroboscopic(cfg));
      r.spectra[j] = spectrum_from_propagators(pp.half, pp.monodromy(), p.omega);
      for (std::size_t s = 0; s < request.pmin_states.size(); ++s) {
        r.pmin[s][j] = min_survival_floquet(pp, request.pmin_states[s], request.n_periods);
      }
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(phi_context(p.phi, e.what()));
    }
  });

  match_tracks(r);
  return r;
}

std::vector<CrossingEvent> classify_crossings(const SweepResult& sweep, const CrossingOptions& options) {
  const std::size_t n = sweep.phis.size();
  if (n < 3) throw DomainError("crossing detection needs at least 3 sweep points");
  const double omega = sweep.params.omega;
  const double exact_tol = options.exact_tol < 0.0 ? 1e-4 * omega : options.exact_tol;
  const double max_gap = options.max_gap < 0.0 ? 0.025 * omega : options.max_gap;

  struct Candidate {
    std::size_t j;
    int a;
    int b;
  };
  std::vector<Candidate> candidates;
  for (int a = 0; a < kTrionStates; ++a)
    for (int b = a + 1; b < kTrionStates; ++b) {
      auto gap = [&](std::size_t j) { return zone_distance(sweep.tracks[j][a], sweep.tracks[j][b], omega); };
      for (std::size_t j = 1; j + 1 < n; ++j) {
        const double g = gap(j);
        const double rim = std::max(gap(j - 1), gap(j + 1));
        if (g <= max_gap && g <= gap(j - 1) && g < gap(j + 1) && rim - g > kDipFloor * omega) {
          candidates.push_back({j, a, b});
        }
      }
    }

  std::vector<std::optional<CrossingEvent>> refined(candidates.size());
  parallel_for(candidates.size(), resolve_workers(options.workers), [&](std::size_t c) {
    const Candidate& cand = candidates[c];
    const FloquetSpectrum& spec = sweep.spectra[cand.j];
    const Amplitudes& ref_a = spec.modes[sweep.slots[cand.j][cand.a]];
    const Amplitudes& ref_b = spec.modes[sweep.slots[cand.j][cand.b]];

    double lo = sweep.phis[cand.j - 1];
    double hi = sweep.phis[cand.j + 1];
    const double stop = options.rel_tol * (hi - lo);
    const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;

    double best_phi = sweep.phis[cand.j];
    PairProbe best;
    bool have_best = false;
    auto evaluate = [&](double phi) {
      try {
        PairProbe pr = probe_pair(sweep.params, sweep.cfg, phi, ref_a, ref_b);
        if (!have_best || pr.gap < best.gap) {
          best = pr;
          best_phi = phi;
          have_best = true;
        }
        return pr.gap;
      } catch (const NumericalFailure& e) {
        throw NumericalFailure(phi_context(phi, e.what()));
      }
    };

    double x1 = hi - inv_golden * (hi - lo);
    double x2 = lo + inv_golden * (hi - lo);
    double f1 = evaluate(x1);
    double f2 = evaluate(x2);
    while (hi - lo > stop) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_golden * (hi - lo);
        f1 = evaluate(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_golden * (hi - lo);
        f2 = evaluate(x2);
      }
    }

    // Same-parity pairs can still close exactly when another symmetry
    // separates them (electron exchange for w_e == w_2e).
    const bool closed = best.gap <= exact_tol;
    if (best.opposite && !closed) return;
    CrossingEvent ev;
    ev.phi_star = best_phi;
    ev.track_a = cand.a;
    ev.track_b = cand.b;
    ev.kind = closed ? CrossingKind::exact : CrossingKind::avoided;
    ev.gap = best.gap;
    ev.opposite_parity = best.opposite;
    ev.mode_a = best.mode_a;
    ev.mode_b = best.mode_b;
    refined[c] = ev;
  });

  std::vector<CrossingEvent> events;
  for (auto& e : refined)
    if (e) events.push_back(*e);
  std::stable_sort(events.begin(), events.end(), [](const CrossingEvent& x, const CrossingEvent& y) {
    return std::tie(x.phi_star, x.track_a, x.track_b) < std::tie(y.phi_star, y.track_a, y.track_b);
  });
  return events;
}

}  // namespace trion
