#pragma once

// Dense complex linear algebra for matrices of dimension <= 8.
//
// Everything is templated on the underlying real type so that the
// concurrence eigenproblem can run in long double; the double
// instantiation is what the rest of the library uses.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "trion/error.hpp"

namespace trion {

inline constexpr std::size_t kMaxMatrixDim = 8;

template <class Real>
class BasicMatrix {
 public:
  using Scalar = std::complex<Real>;

  BasicMatrix() = default;
  explicit BasicMatrix(std::size_t dim);

  static BasicMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  Scalar& operator()(std::size_t row, std::size_t col) { return entries_[row * kMaxMatrixDim + col]; }
  const Scalar& operator()(std::size_t row, std::size_t col) const {
    return entries_[row * kMaxMatrixDim + col];
  }

  BasicMatrix& operator+=(const BasicMatrix& other);
  BasicMatrix& operator-=(const BasicMatrix& other);
  BasicMatrix& operator*=(Scalar factor);

  bool all_finite() const;

  template <class Other>
  BasicMatrix<Other> cast() const {
    BasicMatrix<Other> out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) {
        const Scalar& v = (*this)(r, c);
        out(r, c) = std::complex<Other>(static_cast<Other>(v.real()), static_cast<Other>(v.imag()));
      }
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::array<Scalar, kMaxMatrixDim * kMaxMatrixDim> entries_{};
};

using ComplexMatrix = BasicMatrix<double>;
using ExtendedMatrix = BasicMatrix<long double>;

template <class Real>
BasicMatrix<Real> operator+(BasicMatrix<Real> a, const BasicMatrix<Real>& b) {
  return a += b;
}
template <class Real>
BasicMatrix<Real> operator-(BasicMatrix<Real> a, const BasicMatrix<Real>& b) {
  return a -= b;
}
template <class Real>
BasicMatrix<Real> operator*(std::complex<Real> s, BasicMatrix<Real> a) {
  return a *= s;
}

// Throws DomainError on dimension mismatch.
template <class Real>
BasicMatrix<Real> matmul(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b);

template <class Real>
BasicMatrix<Real> adjoint(const BasicMatrix<Real>& a);

template <class Real>
std::vector<std::complex<Real>> apply(const BasicMatrix<Real>& a, std::span<const std::complex<Real>> v);

template <class Real>
Real frobenius_norm(const BasicMatrix<Real>& a);

template <class Real>
std::complex<Real> trace(const BasicMatrix<Real>& a);

// ||A^dagger A - I||_F
template <class Real>
Real unitarity_defect(const BasicMatrix<Real>& a);

template <class Real>
struct EigenPairs {
  std::vector<std::complex<Real>> values;
  // Empty unless requested; otherwise one unit-norm vector per value.
  std::vector<std::vector<std::complex<Real>>> vectors;
};

template <class Real>
struct HermitianEigen {
  std::vector<Real> values;  // ascending
  std::vector<std::vector<std::complex<Real>>> vectors;
};

// Hessenberg reduction followed by Wilkinson-shifted complex QR.
// Values are ordered by descending modulus, ties broken by descending real
// part and then descending imaginary part. Throws NumericalFailure (with
// the current iterate in the message) when 100*dim^2 sweeps do not suffice.
template <class Real>
EigenPairs<Real> eig_general(const BasicMatrix<Real>& a, bool want_vectors = true);

// Cyclic complex Jacobi. Throws DomainError when ||A - A^dagger|| exceeds
// 1e-12 ||A||.
template <class Real>
HermitianEigen<Real> eig_hermitian(const BasicMatrix<Real>& a);

}  // namespace trion
