#pragma once

// Trion basis, ac drive and the 8x8 driven Hamiltonian of two electrons
// (spin up, spin down) and one hole in a double quantum dot.
//
// Basis state alpha (1..8) is |e_up e_down h> with 0 = left dot and
// 1 = right dot, alpha = 4 e_up + 2 e_down + h + 1. Energies and times are
// dimensionless (hbar = 1).

#include <array>
#include <complex>

#include "trion/linalg.hpp"

namespace trion {

inline constexpr int kTrionStates = 8;

using Complex = std::complex<double>;
using Amplitudes = std::array<Complex, kTrionStates>;

struct ModelParams {
  double w_e = 0.0;   // spin-up electron hopping
  double w_2e = 0.0;  // spin-down electron hopping
  double w_h = 0.0;   // hole hopping
  double u = 0.0;     // -|U1| + |V1|
  double omega = 1.0;
  double phi = 0.0;   // drive potential

  double period() const;
  // Throws DomainError unless omega > 0, phi >= 0 and every field is finite.
  void validate() const;
};

struct Occupancy {
  int e_up = 0;
  int e_down = 0;
  int h = 0;

  friend bool operator==(const Occupancy&, const Occupancy&) = default;
};

// Throws DomainError for arguments outside {0,1} / 1..8.
int basis_index(Occupancy occ);
Occupancy basis_occupancy(int alpha);

// F(t) = phi cos(omega t)
double drive_field(const ModelParams& params, double t);

ComplexMatrix hamiltonian_at(const ModelParams& params, double t);

// out = H(t) in, using the fixed sparsity of the trion Hamiltonian.
void apply_hamiltonian(const ModelParams& params, double t, const Amplitudes& in, Amplitudes& out);
// Same with the drive field value F supplied by the caller.
void apply_hamiltonian_field(const ModelParams& params, double field, const Amplitudes& in, Amplitudes& out);

// Generalized parity: flips all three occupancy bits (alpha <-> 9 - alpha).
ComplexMatrix parity_operator();
Amplitudes apply_parity(const Amplitudes& v);

// Microscopic parameters of the second-quantized Hubbard model.
struct MicroParams {
  double eps_e = 0.0;  // electron level
  double eps_h = 0.0;  // hole level
  double u1 = 0.0;     // intra-dot Coulomb magnitude
  double v1 = 0.0;     // inter-dot Coulomb magnitude
  double w_e = 0.0;
  double w_2e = 0.0;
  double w_h = 0.0;
  double omega = 1.0;
  double phi = 0.0;

  // Effective parameters with u = -u1 + v1.
  ModelParams effective() const;
  void validate() const;
};

// Builds the Hamiltonian from creation/annihilation operators over the
// three-carrier configurations, restricted to the eight trion states and
// shifted by a constant (the mean diagonal offset against hamiltonian_at).
// Throws NumericalFailure if that offset is not the same for every state.
ComplexMatrix build_from_second_quantized(const MicroParams& micro, double t);

}  // namespace trion
