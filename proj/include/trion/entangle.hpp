#pragma once

// Electron-electron entanglement of trion states: partial trace over the
// hole, Wootters concurrence, closed-form estimates, Bell overlaps and the
// amplitude filters used to isolate one qubit pair.

#include <bitset>
#include <optional>
#include <string>
#include <vector>

#include "trion/evolve.hpp"
#include "trion/linalg.hpp"

namespace trion {

// Two-electron density matrix in the pair basis (e_up, e_down) =
// (0,0), (0,1), (1,0), (1,1).
class DensityMatrix4 {
 public:
  // Throws DomainError unless Hermitian and of unit trace within 1e-10 with
  // eigenvalues >= -1e-10.
  explicit DensityMatrix4(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

 private:
  ComplexMatrix m_;
};

// rho_jk = sum_h c_{j,h} conj(c_{k,h}) / |psi|^2.
DensityMatrix4 reduce_over_hole(const StateVector& psi);

// (sigma_y x sigma_y) conj(rho) (sigma_y x sigma_y)
ComplexMatrix spin_flip(const ComplexMatrix& rho);
ComplexMatrix spin_flip(const DensityMatrix4& rho);

// max(l1 - l2 - l3 - l4, 0) with l_i the descending square roots of the
// eigenvalues of rho * spin_flip(rho). Throws NumericalFailure when an
// eigenvalue has |imag| > 1e-8 or real part < -1e-8.
double concurrence(const DensityMatrix4& rho);
double concurrence(const StateVector& psi);

// 2|c3||c5| for states on {1,3,5}. Throws DomainError unless
// |c1|^2 + |c3|^2 + |c5|^2 = 1 within 1e-9.
double concurrence_three_state(Complex c1, Complex c3, Complex c5);

// Closed-form approximation for states on {1,2,7,8}:
// sqrt(A + sqrt(B C)) with x = conj(c1) c7 + conj(c2) c8,
// A = (|c1|^2 + |c2|^2)(|c7|^2 + |c8|^2) + |x|^2,
// B = |c7 + c8|^2 Re x, C = |c1 + c2|^2 Re x.
// Throws DomainError unless the four populations sum to 1 within 1e-9.
double concurrence_double_slit(Complex c1, Complex c2, Complex c7, Complex c8);

// The same formulas evaluated on raw amplitudes, without the norm check.
double pair_concurrence_estimate(Complex a, Complex b);
double double_slit_estimate(Complex c1, Complex c2, Complex c7, Complex c8);

enum class BellLabel { eta, alpha, beta };

// eta = (|3> + |5>)/sqrt2, alpha = (|1> + |7>)/sqrt2, beta = (|2> + |8>)/sqrt2.
struct BellTarget {
  BellLabel label;
  StateVector vector;
};

BellTarget bell_target(BellLabel label);
std::optional<BellLabel> parse_bell_label(const std::string& name);
const char* to_string(BellLabel label);

double bell_overlap(const StateVector& psi, const BellTarget& target);

enum class FilterMode { renormalize, group_weighted };

struct FilterSpec {
  std::bitset<kTrionStates> zeroed;  // bit alpha - 1
  FilterMode mode = FilterMode::renormalize;

  static FilterSpec zero(std::initializer_list<int> states, FilterMode mode = FilterMode::renormalize);
  void validate() const;  // DomainError if every state is zeroed
};

// renormalize: zero the listed amplitudes and rescale to unit norm.
// group_weighted: zero them, multiply odd-index amplitudes by the norm of
// the odd group and even-index ones by the norm of the even group (both
// taken before zeroing), then rescale. Throws DomainError when nothing
// remains.
StateVector filtered_state(const StateVector& psi, const FilterSpec& spec);

// Centered running maximum over `window` samples.
std::vector<double> sliding_max(const std::vector<double>& values, int window);
// Interior samples with v[i] > v[i-1] and v[i] >= v[i+1].
int count_local_maxima(const std::vector<double>& values);

enum class AnalyticForm { pair, double_slit };

struct EntangleRequest {
  BellLabel target = BellLabel::eta;
  std::optional<FilterSpec> filter;
  AnalyticForm analytic = AnalyticForm::pair;
  int pair_i = 3;  // 1-based states for AnalyticForm::pair
  int pair_j = 5;
  int window = 1;  // envelope window in samples (one drive period)
};

struct EntangleSeries {
  std::vector<double> times;
  std::vector<double> concurrence_full;
  std::vector<double> concurrence_analytic;
  std::vector<double> overlap;
  std::vector<double> overlap_envelope;
};

// Evaluates every sample of the trajectory. The overlap always uses the
// unfiltered state; with a filter both concurrence columns use the filtered
// state and report zero where nothing remains.
EntangleSeries entangle_series(const Trajectory& traj, const EntangleRequest& request, int workers = 0);

}  // namespace trion
