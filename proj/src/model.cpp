#include "trion/model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "trion/error.hpp"

namespace trion {

namespace {

enum class Carrier { electron_up, electron_down, hole };

struct Bond {
  int a;  // 0-based
  int b;
  Carrier carrier;
};

// Pairs of basis states that differ by one carrier hopping between the dots.
constexpr std::array<Bond, 12> kBonds{{
    {0, 1, Carrier::hole},
    {2, 3, Carrier::hole},
    {4, 5, Carrier::hole},
    {6, 7, Carrier::hole},
    {0, 2, Carrier::electron_down},
    {1, 3, Carrier::electron_down},
    {4, 6, Carrier::electron_down},
    {5, 7, Carrier::electron_down},
    {0, 4, Carrier::electron_up},
    {1, 5, Carrier::electron_up},
    {2, 6, Carrier::electron_up},
    {3, 7, Carrier::electron_up},
}};

// Diagonal of H in units of (F, u): diag_alpha = f_coef * F + u_coef * u.
constexpr std::array<double, 8> kFieldCoef{-1.5, -0.5, -0.5, 0.5, -0.5, 0.5, 0.5, 1.5};
constexpr std::array<double, 8> kCoulombCoef{0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0};

double hopping(const ModelParams& p, Carrier c) {
  switch (c) {
    case Carrier::electron_up: return p.w_e;
    case Carrier::electron_down: return p.w_2e;
    case Carrier::hole: return p.w_h;
  }
  return 0.0;
}

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

double ModelParams::period() const { return 2.0 * std::numbers::pi / omega; }

void ModelParams::validate() const {
  if (!finite_all({w_e, w_2e, w_h, u, omega, phi})) throw DomainError("model parameters must be finite");
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  if (phi < 0.0) throw DomainError("drive potential phi must be non-negative");
}

int basis_index(Occupancy occ) {
  for (int bit : {occ.e_up, occ.e_down, occ.h}) {
    if (bit != 0 && bit != 1) throw DomainError("occupancy entries must be 0 (left) or 1 (right)");
  }
  return 4 * occ.e_up + 2 * occ.e_down + occ.h + 1;
}

Occupancy basis_occupancy(int alpha) {
  if (alpha < 1 || alpha > kTrionStates) {
    throw DomainError("basis index must be in 1..8, got " + std::to_string(alpha));
  }
  const int k = alpha - 1;
  return Occupancy{(k >> 2) & 1, (k >> 1) & 1, k & 1};
}

double drive_field(const ModelParams& params, double t) { return params.phi * std::cos(params.omega * t); }

ComplexMatrix hamiltonian_at(const ModelParams& params, double t) {
  const double f = drive_field(params, t);
  ComplexMatrix h(kTrionStates);
  for (int i = 0; i < kTrionStates; ++i) h(i, i) = kFieldCoef[i] * f + kCoulombCoef[i] * params.u;
  for (const Bond& b : kBonds) {
    const double w = hopping(params, b.carrier);
    h(b.a, b.b) = w;
    h(b.b, b.a) = w;
  }
  return h;
}

void apply_hamiltonian(const ModelParams& params, double t, const Amplitudes& in, Amplitudes& out) {
  apply_hamiltonian_field(params, drive_field(params, t), in, out);
}

void apply_hamiltonian_field(const ModelParams& params, double f, const Amplitudes& in, Amplitudes& out) {
  for (int i = 0; i < kTrionStates; ++i) out[i] = (kFieldCoef[i] * f + kCoulombCoef[i] * params.u) * in[i];
  const double wh = params.w_h;
  const double w2e = params.w_2e;
  const double we = params.w_e;
  for (int i = 0; i < kTrionStates; i += 2) {
    out[i] += wh * in[i + 1];
    out[i + 1] += wh * in[i];
  }
  for (int i : {0, 1, 4, 5}) {
    out[i] += w2e * in[i + 2];
    out[i + 2] += w2e * in[i];
  }
  for (int i = 0; i < 4; ++i) {
    out[i] += we * in[i + 4];
    out[i + 4] += we * in[i];
  }
}

ComplexMatrix parity_operator() {
  ComplexMatrix p(kTrionStates);
  for (int i = 0; i < kTrionStates; ++i) p(i, kTrionStates - 1 - i) = 1.0;
  return p;
}

Amplitudes apply_parity(const Amplitudes& v) {
  Amplitudes out;
  for (int i = 0; i < kTrionStates; ++i) out[i] = v[kTrionStates - 1 - i];
  return out;
}

ModelParams MicroParams::effective() const {
  return ModelParams{w_e, w_2e, w_h, -u1 + v1, omega, phi};
}

void MicroParams::validate() const {
  if (!finite_all({eps_e, eps_h, u1, v1, w_e, w_2e, w_h, omega, phi})) {
    throw DomainError("microscopic parameters must be finite");
  }
  if (u1 < 0.0 || v1 < 0.0) throw DomainError("Coulomb magnitudes u1, v1 must be non-negative");
  effective().validate();
}

namespace {

// Fock space of six single-particle modes. Mode ordering fixes the fermionic
// sign convention: e_up L, e_up R, e_down L, e_down R, h L, h R.
int mode_of(Carrier c, int dot) {
  switch (c) {
    case Carrier::electron_up: return 0 + dot;
    case Carrier::electron_down: return 2 + dot;
    case Carrier::hole: return 4 + dot;
  }
  return -1;
}

using Fock = unsigned;

struct FockTerm {
  Fock state = 0;
  double sign = 0.0;  // 0 marks annihilation of the vacuum / Pauli blocking
};

// Number of occupied modes preceding `mode` (Jordan-Wigner string).
int parity_before(Fock s, int mode) { return std::popcount(s & ((1u << mode) - 1u)); }

FockTerm annihilate(FockTerm t, int mode) {
  if (t.sign == 0.0 || !(t.state & (1u << mode))) return {};
  const double sgn = (parity_before(t.state, mode) % 2) ? -1.0 : 1.0;
  return {t.state & ~(1u << mode), t.sign * sgn};
}

FockTerm create(FockTerm t, int mode) {
  if (t.sign == 0.0 || (t.state & (1u << mode))) return {};
  const double sgn = (parity_before(t.state, mode) % 2) ? -1.0 : 1.0;
  return {t.state | (1u << mode), t.sign * sgn};
}

bool occupied(Fock s, int mode) { return (s >> mode) & 1u; }

// The 32 three-carrier configurations: electron a in one of four (dot, spin)
// modes, electron b likewise, hole in one of two dots. Only configurations
// with one spin-up and one spin-down electron form a trion state.
std::array<Fock, kTrionStates> trion_configurations() {
  std::array<Fock, kTrionStates> basis{};
  int kept = 0;
  for (int ea = 0; ea < 4; ++ea)
    for (int eb = 0; eb < 4; ++eb)
      for (int hd = 0; hd < 2; ++hd) {
        const bool a_up = ea < 2;
        const bool b_down = eb >= 2;
        if (!a_up || !b_down) continue;
        const int up_dot = ea % 2;
        const int down_dot = eb % 2;
        const int alpha = basis_index({up_dot, down_dot, hd});
        basis[alpha - 1] = (1u << mode_of(Carrier::electron_up, up_dot)) |
                           (1u << mode_of(Carrier::electron_down, down_dot)) |
                           (1u << mode_of(Carrier::hole, hd));
        ++kept;
      }
  if (kept != kTrionStates) throw NumericalFailure("trion configuration filter kept the wrong number of states");
  return basis;
}

// Coulomb pair energy. With one magnitude per intra-dot (u1) and inter-dot
// (v1) pair, the effective diagonal (2u on |0 0 1> and |1 1 0>, the other
// states degenerate) arises only when electron-hole pairs carry +magnitude
// and the electron-electron pair carries -magnitude. The opposite sign
// assignment yields -2u on those states instead.
double coulomb_pair(Carrier a, Carrier b, bool same_dot, const MicroParams& m) {
  const double magnitude = same_dot ? m.u1 : m.v1;
  const bool electron_pair = a != Carrier::hole && b != Carrier::hole;
  return electron_pair ? -magnitude : magnitude;
}

}  // namespace

ComplexMatrix build_from_second_quantized(const MicroParams& micro, double t) {
  micro.validate();
  const std::array<Fock, kTrionStates> basis = trion_configurations();
  const double shift = 0.5 * micro.phi * std::cos(micro.omega * t);
  const std::array<Carrier, 3> carriers{Carrier::electron_up, Carrier::electron_down, Carrier::hole};

  auto level = [&](Carrier c, int dot) {
    const double eps0 = c == Carrier::hole ? micro.eps_h : micro.eps_e;
    return dot == 0 ? eps0 - shift : eps0 + shift;
  };
  auto hop = [&](Carrier c) {
    switch (c) {
      case Carrier::electron_up: return micro.w_e;
      case Carrier::electron_down: return micro.w_2e;
      case Carrier::hole: return micro.w_h;
    }
    return 0.0;
  };

  ComplexMatrix h(kTrionStates);
  for (int col = 0; col < kTrionStates; ++col) {
    const Fock ket = basis[col];
    // Hopping: sum_c W_c (d_cL^dag d_cR + d_cR^dag d_cL).
    for (Carrier c : carriers) {
      for (int from = 0; from < 2; ++from) {
        const int to = 1 - from;
        const FockTerm out = create(annihilate({ket, 1.0}, mode_of(c, from)), mode_of(c, to));
        if (out.sign == 0.0) continue;
        for (int row = 0; row < kTrionStates; ++row)
          if (basis[row] == out.state) h(row, col) += hop(c) * out.sign;
      }
    }
    // Diagonal: on-site levels and density-density Coulomb terms. The
    // ordered-pair sum with prefactor 1/2 equals the unordered-pair sum.
    double diag = 0.0;
    for (Carrier c : carriers)
      for (int dot = 0; dot < 2; ++dot)
        if (occupied(ket, mode_of(c, dot))) diag += level(c, dot);
    for (std::size_t i = 0; i < carriers.size(); ++i)
      for (std::size_t j = 0; j < carriers.size(); ++j) {
        if (i == j) continue;
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj) {
            if (!occupied(ket, mode_of(carriers[i], di)) || !occupied(ket, mode_of(carriers[j], dj))) continue;
            diag += 0.5 * coulomb_pair(carriers[i], carriers[j], di == dj, micro);
          }
      }
    h(col, col) += diag;
  }

  // Gauge constant: mean diagonal discrepancy against the effective matrix,
  // which must be the same for every state.
  const ComplexMatrix reference = hamiltonian_at(micro.effective(), t);
  double mean = 0.0;
  for (int i = 0; i < kTrionStates; ++i) mean += (h(i, i) - reference(i, i)).real();
  mean /= kTrionStates;
  double scale = 1.0;
  for (int i = 0; i < kTrionStates; ++i) scale = std::max(scale, std::abs(h(i, i)));
  for (int i = 0; i < kTrionStates; ++i) {
    if (std::abs((h(i, i) - reference(i, i)).real() - mean) > 1e-12 * scale) {
      throw NumericalFailure("second-quantized Hamiltonian differs from the effective one by more than a constant");
    }
    h(i, i) -= mean;
  }
  return h;
}

}  // namespace trion
