#pragma once

// Time evolution i dpsi/dt = H(t) psi with fixed-step classical RK4.

#include <vector>

#include "trion/linalg.hpp"
#include "trion/model.hpp"

namespace trion {

inline constexpr double kStateNormTolerance = 1e-9;

class StateVector {
 public:
  StateVector();  // |1>

  // Throws DomainError unless sum |c|^2 = 1 within kStateNormTolerance.
  explicit StateVector(const Amplitudes& amplitudes);

  // Rescales to unit norm; throws DomainError for the zero vector.
  static StateVector normalized(const Amplitudes& amplitudes);
  // Stores integrator output as is (norm drift bounded by the trajectory).
  static StateVector raw(const Amplitudes& amplitudes);
  static StateVector basis(int alpha);

  const Amplitudes& amplitudes() const { return amps_; }
  Complex amplitude(int alpha) const;  // 1-based
  double population(int alpha) const;  // 1-based
  double norm_squared() const;

 private:
  struct Unchecked {};
  StateVector(const Amplitudes& amplitudes, Unchecked) : amps_(amplitudes) {}

  Amplitudes amps_{};
};

struct IntegratorConfig {
  int steps_per_period = 16384;
  int sample_stride = 64;

  // steps_per_period >= 64, sample_stride >= 1 and divides steps_per_period.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  double step = 0.0;

  double max_norm_drift() const;
};

// Samples every sample_stride steps plus the final time. The step is the
// largest h <= T / steps_per_period that divides t1 - t0 evenly.
Trajectory integrate(const ModelParams& params, const StateVector& psi0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

// The linear RK4 map on an arbitrary (unnormalized) vector.
Amplitudes advance(const ModelParams& params, const Amplitudes& psi, double t0, double t1,
                   const IntegratorConfig& cfg = {});

// U(t1, t0). Identity when t1 == t0.
ComplexMatrix propagator(const ModelParams& params, double t0, double t1, const IntegratorConfig& cfg = {});

// min |c_alpha|^2 over the sampled times in (0, n_periods T], starting in |alpha>.
double min_survival(const ModelParams& params, int alpha, int n_periods, const IntegratorConfig& cfg = {});

// One period of sampled propagators U(t_j, 0), t_j in (0, T], plus U(T/2, 0).
struct PeriodPropagator {
  double period = 0.0;
  std::vector<double> times;
  std::vector<ComplexMatrix> samples;
  ComplexMatrix half;

  const ComplexMatrix& monodromy() const { return samples.back(); }
};

PeriodPropagator sample_period_propagator(const ModelParams& params, const IntegratorConfig& cfg = {});

// Same observable as min_survival, composed from one period of propagators:
// c(nT + t_j) = U(t_j, 0) U(T, 0)^n e_alpha.
double min_survival_floquet(const PeriodPropagator& prop, int alpha, int n_periods);

}  // namespace trion
