#pragma once

// Quasienergies, Floquet modes and generalized-parity labels, sweeps over
// the drive potential, and exact/avoided crossing detection.

#include <array>
#include <vector>

#include "trion/evolve.hpp"
#include "trion/model.hpp"

namespace trion {

enum class Parity { even, odd, unresolved };

const char* to_string(Parity p);
int parity_sign(Parity p);  // +1, -1, 0

struct FloquetSpectrum {
  double omega = 1.0;
  std::array<double, kTrionStates> quasienergies{};  // ascending, in [-omega/2, omega/2)
  std::array<Amplitudes, kTrionStates> modes{};      // Floquet modes at t = 0
  std::array<Parity, kTrionStates> parities{};
  // Eigenvalues of the half-period parity map S = Pi U(T/2, 0);
  // mu^2 = exp(-i eps T).
  std::array<Complex, kTrionStates> multipliers{};
};

// eps - m omega in [-omega/2, omega/2). Throws DomainError unless omega > 0.
double fold_to_zone(double eps, double omega);
// Distance between two quasienergies on the zone circle, in [0, omega/2].
double zone_distance(double a, double b, double omega);

// Builds S = Pi U(T/2, 0), checks S^2 against U(T, 0) (NumericalFailure
// beyond 1e-5) and diagonalizes S.
FloquetSpectrum quasienergies(const ModelParams& params, const IntegratorConfig& cfg = {});

FloquetSpectrum spectrum_from_propagators(const ComplexMatrix& half, const ComplexMatrix& full, double omega);
// Same without the S^2 consistency check.
FloquetSpectrum spectrum_from_half_period(const ComplexMatrix& half, double omega);

struct SweepRequest {
  double phi_min = 0.0;
  double phi_max = 0.0;
  int n_points = 2;
  std::vector<int> pmin_states;  // 1-based states whose P^min is evaluated
  int n_periods = 30;
  int workers = 0;  // 0: see resolve_workers
};

struct SweepResult {
  ModelParams params;  // template; phi varies per point
  IntegratorConfig cfg;
  std::vector<double> phis;
  std::vector<FloquetSpectrum> spectra;
  // Per point: quasienergy, parity and spectrum slot of each track.
  std::vector<std::array<double, kTrionStates>> tracks;
  std::vector<std::array<Parity, kTrionStates>> track_parities;
  std::vector<std::array<int, kTrionStates>> slots;
  // Per point: matching from the previous point was ambiguous.
  std::vector<bool> unresolved;
  std::vector<int> pmin_states;
  std::vector<std::vector<double>> pmin;  // pmin[state][point]
};

// Spectra at n_points uniformly spaced drive potentials, matched into tracks
// by maximal mode overlap. Numerical failures are rethrown with the
// offending phi in the message.
SweepResult sweep_quasienergies(const ModelParams& params, const SweepRequest& request,
                                const IntegratorConfig& cfg = {});

enum class CrossingKind { exact, avoided };

const char* to_string(CrossingKind k);

struct CrossingEvent {
  double phi_star = 0.0;
  int track_a = 0;  // 0-based, track_a < track_b
  int track_b = 0;
  CrossingKind kind = CrossingKind::avoided;
  double gap = 0.0;
  bool opposite_parity = false;
  Amplitudes mode_a{};  // Floquet modes at phi_star
  Amplitudes mode_b{};
};

struct CrossingOptions {
  double exact_tol = -1.0;  // < 0: 1e-4 omega
  double max_gap = -1.0;    // < 0: 0.025 omega; grid minima above it are ignored
  double rel_tol = 1e-4;    // final bracket relative to the initial one
  int workers = 0;
};

// Local minima of the zone distance between every track pair, refined by
// golden-section search. A minimum closing below exact_tol is exact; a
// same-parity minimum above it is avoided; an opposite-parity minimum above
// it is dropped. Sorted by phi_star, then track pair.
std::vector<CrossingEvent> classify_crossings(const SweepResult& sweep, const CrossingOptions& options = {});

}  // namespace trion
