#pragma once

// Parameter sets and independent reference computations shared by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "trion/entangle.hpp"
#include "trion/evolve.hpp"
#include "trion/linalg.hpp"
#include "trion/model.hpp"

namespace testing {

using trion::Amplitudes;
using trion::Complex;
using trion::ComplexMatrix;
using trion::ModelParams;

inline ModelParams fig1_params(double phi = 0.0) { return ModelParams{1.0, 1.0, 0.6, -1.0, 2.0, phi}; }
inline ModelParams fig3_params() { return ModelParams{1.7, 1.7, 0.6, -20.0, 2.0, 24.6}; }
inline ModelParams decoupled_params() { return ModelParams{0.0, 0.0, 0.0, -1.0, 2.0, 0.0}; }

inline Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = random_complex(rng);
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  ComplexMatrix m = random_matrix(rng, n);
  ComplexMatrix h(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) h(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  return h;
}

// Gram-Schmidt on the columns of a random matrix.
inline ComplexMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
  ComplexMatrix m = random_matrix(rng, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      Complex proj = 0.0;
      for (std::size_t r = 0; r < n; ++r) proj += std::conj(m(r, p)) * m(r, c);
      for (std::size_t r = 0; r < n; ++r) m(r, c) -= proj * m(r, p);
    }
    double nrm = 0.0;
    for (std::size_t r = 0; r < n; ++r) nrm += std::norm(m(r, c));
    nrm = std::sqrt(nrm);
    for (std::size_t r = 0; r < n; ++r) m(r, c) /= nrm;
  }
  return m;
}

inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

// Determinant by LU with partial pivoting.
inline Complex lu_determinant(ComplexMatrix a) {
  const std::size_t n = a.dim();
  Complex det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
    if (a(piv, k) == Complex(0.0)) return 0.0;
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const Complex f = a(r, k) / a(k, k);
      for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return det;
}

// exp(-i H t) for constant H by scaling and squaring of a Taylor series.
inline ComplexMatrix expm_minus_i(const ComplexMatrix& h, double t) {
  const std::size_t n = h.dim();
  double norm = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) norm += std::norm(h(r, c));
  norm = std::sqrt(norm) * std::abs(t);
  int squarings = 0;
  while (norm > 0.05) {
    norm /= 2;
    ++squarings;
  }
  const double dt = t / std::ldexp(1.0, squarings);
  ComplexMatrix a(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = Complex(0.0, -dt) * h(r, c);
  ComplexMatrix result = ComplexMatrix::identity(n);
  ComplexMatrix term = ComplexMatrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = naive_product(term, a);
    term *= Complex(1.0 / k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = naive_product(result, result);
  return result;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
  return m;
}

// Random unit 8-vector supported on the given 1-based states.
inline Amplitudes random_state(std::mt19937_64& rng, const std::vector<int>& support) {
  Amplitudes a{};
  double n = 0.0;
  for (int s : support) {
    a[s - 1] = random_complex(rng);
    n += std::norm(a[s - 1]);
  }
  for (Complex& c : a) c /= std::sqrt(n);
  return a;
}

inline Amplitudes random_state(std::mt19937_64& rng) { return random_state(rng, {1, 2, 3, 4, 5, 6, 7, 8}); }

// Concurrence from the Hermitian form sqrt(sqrt(rho) rho~ sqrt(rho)), with
// rho~ built as an explicit (sy x sy) conj(rho) (sy x sy) product.
inline double wootters_oracle(const ComplexMatrix& rho) {
  using trion::ExtendedMatrix;
  using LComplex = std::complex<long double>;
  ExtendedMatrix y(4);
  const LComplex sy[2][2] = {{0.0L, LComplex(0, -1)}, {LComplex(0, 1), 0.0L}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) y(2 * a + c, 2 * b + d) = sy[a][b] * sy[c][d];
  ExtendedMatrix r = rho.cast<long double>();
  ExtendedMatrix rc(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rc(i, j) = std::conj(r(i, j));
  const ExtendedMatrix flipped = trion::matmul(trion::matmul(y, rc), y);

  const auto er = trion::eig_hermitian(r);
  ExtendedMatrix root(4);
  for (int k = 0; k < 4; ++k) {
    const long double s = std::sqrt(std::max(er.values[k], 0.0L));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) root(i, j) += s * er.vectors[k][i] * std::conj(er.vectors[k][j]);
  }
  ExtendedMatrix m = trion::matmul(trion::matmul(root, flipped), root);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const LComplex avg = 0.5L * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = avg;
      m(j, i) = std::conj(avg);
    }
  std::vector<long double> l;
  for (long double v : trion::eig_hermitian(m).values) l.push_back(std::sqrt(std::max(v, 0.0L)));
  std::sort(l.begin(), l.end(), std::greater<>());
  return static_cast<double>(std::max(l[0] - l[1] - l[2] - l[3], 0.0L));
}

// Independent partial trace: sum over the hole occupancy.
inline ComplexMatrix trace_out_hole(const Amplitudes& c) {
  ComplexMatrix rho(4);
  double n = 0.0;
  for (const Complex& x : c) n += std::norm(x);
  for (int eu = 0; eu < 2; ++eu)
    for (int ed = 0; ed < 2; ++ed)
      for (int fu = 0; fu < 2; ++fu)
        for (int fd = 0; fd < 2; ++fd)
          for (int h = 0; h < 2; ++h) {
            const Complex a = c[trion::basis_index({eu, ed, h}) - 1];
            const Complex b = c[trion::basis_index({fu, fd, h}) - 1];
            rho(2 * eu + ed, 2 * fu + fd) += a * std::conj(b) / n;
          }
  return rho;
}

}  // namespace testing
