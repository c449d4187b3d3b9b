#include <doctest.h>

#include <numeric>

#include "support.hpp"
#include "trion/error.hpp"
#include "trion/linalg.hpp"
#include "trion/model.hpp"

using namespace trion;
using testing::max_abs_diff;

namespace {

double residual(const ComplexMatrix& a, Complex lambda, const std::vector<Complex>& v) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    Complex s = -lambda * v[i];
    for (std::size_t j = 0; j < a.dim(); ++j) s += a(i, j) * v[j];
    r += std::norm(s);
  }
  return std::sqrt(r);
}

}  // namespace

TEST_CASE("matmul agrees with the triple-loop product") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 3u, 4u, 8u}) {
    const ComplexMatrix a = testing::random_matrix(rng, n);
    const ComplexMatrix b = testing::random_matrix(rng, n);
    CHECK(max_abs_diff(matmul(a, b), testing::naive_product(a, b)) <= 1e-14 * 8);
  }
  const ComplexMatrix a = testing::random_matrix(rng, 5);
  CHECK(max_abs_diff(matmul(ComplexMatrix::identity(5), a), a) == 0.0);
  const ComplexMatrix p = parity_operator();
  CHECK(max_abs_diff(matmul(p, p), ComplexMatrix::identity(8)) == 0.0);
}

TEST_CASE("dimension and finiteness checks") {
  CHECK_THROWS_AS(matmul(ComplexMatrix(3), ComplexMatrix(4)), DomainError);
  CHECK_THROWS_AS(ComplexMatrix(9), DomainError);
  ComplexMatrix bad = ComplexMatrix::identity(3);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(bad.all_finite());
  CHECK_THROWS_AS(eig_general(bad), NumericalFailure);
}

TEST_CASE("adjoint, trace and norms") {
  std::mt19937_64 rng(3);
  const ComplexMatrix a = testing::random_matrix(rng, 6);
  const ComplexMatrix ad = adjoint(a);
  Complex tr = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    tr += a(i, i);
    for (std::size_t j = 0; j < 6; ++j) CHECK(ad(i, j) == std::conj(a(j, i)));
  }
  CHECK(std::abs(trace(a) - tr) <= 1e-14);
  CHECK(unitarity_defect(testing::random_unitary(rng, 8)) <= 1e-13);
  CHECK(frobenius_norm(ComplexMatrix::identity(4)) == doctest::Approx(2.0));
}

TEST_CASE("eig_general sorts by descending modulus") {
  ComplexMatrix d(3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = -2.0;
  const EigenPairs<double> e = eig_general(d);
  REQUIRE(e.values.size() == 3);
  CHECK(std::abs(e.values[0] - 3.0) <= 1e-14);
  CHECK(std::abs(e.values[1] + 2.0) <= 1e-14);
  CHECK(std::abs(e.values[2] - 1.0) <= 1e-14);

  // Equal moduli: descending real part, then descending imaginary part.
  ComplexMatrix ties(4);
  ties(0, 0) = Complex(0, -1);
  ties(1, 1) = -1.0;
  ties(2, 2) = Complex(0, 1);
  ties(3, 3) = 1.0;
  const EigenPairs<double> t = eig_general(ties);
  CHECK(std::abs(t.values[0] - 1.0) <= 1e-14);
  CHECK(std::abs(t.values[1] - Complex(0, 1)) <= 1e-14);
  CHECK(std::abs(t.values[2] - Complex(0, -1)) <= 1e-14);
  CHECK(std::abs(t.values[3] + 1.0) <= 1e-14);
}

TEST_CASE("eig_general residuals, trace and determinant on random matrices") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
    const ComplexMatrix a = testing::random_matrix(rng, n);
    const double anorm = frobenius_norm(a);
    const EigenPairs<double> e = eig_general(a);
    REQUIRE(e.values.size() == n);
    REQUIRE(e.vectors.size() == n);
    Complex sum = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(residual(a, e.values[i], e.vectors[i]) <= 1e-10 * anorm);
      double vn = 0.0;
      for (const Complex& x : e.vectors[i]) vn += std::norm(x);
      CHECK(std::abs(vn - 1.0) <= 1e-12);
      sum += e.values[i];
      prod *= e.values[i];
      if (i > 0) CHECK(std::abs(e.values[i - 1]) >= std::abs(e.values[i]) * (1 - 1e-12));
    }
    CHECK(std::abs(sum - trace(a)) <= 1e-10 * anorm);
    CHECK(std::abs(prod - testing::lu_determinant(a)) <= 1e-8 * std::pow(anorm, static_cast<double>(n)));
  }
}

TEST_CASE("eig_general on a companion matrix recovers known roots") {
  // (x-1)(x-2)(x-3)(x-4) = x^4 - 10x^3 + 35x^2 - 50x + 24
  ComplexMatrix c(4);
  c(0, 0) = 10.0;
  c(0, 1) = -35.0;
  c(0, 2) = 50.0;
  c(0, 3) = -24.0;
  c(1, 0) = 1.0;
  c(2, 1) = 1.0;
  c(3, 2) = 1.0;
  const EigenPairs<double> e = eig_general(c, false);
  CHECK(e.vectors.empty());
  for (int i = 0; i < 4; ++i) CHECK(std::abs(e.values[static_cast<std::size_t>(i)] - double(4 - i)) <= 1e-9);
}

TEST_CASE("eig_general handles defective and unitary matrices") {
  ComplexMatrix jordan(3);
  jordan(0, 0) = jordan(1, 1) = jordan(2, 2) = 2.0;
  jordan(0, 1) = jordan(1, 2) = 1.0;
  const EigenPairs<double> j = eig_general(jordan);
  for (const Complex& v : j.values) CHECK(std::abs(v - 2.0) <= 1e-4);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const EigenPairs<double> u = eig_general(testing::random_unitary(rng, 8));
    for (const Complex& v : u.values) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-10);
  }
}

TEST_CASE("eig_general in extended precision") {
  std::mt19937_64 rng(8);
  const ComplexMatrix a = testing::random_matrix(rng, 4);
  const EigenPairs<long double> e = eig_general(a.cast<long double>());
  const EigenPairs<double> d = eig_general(a);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(Complex(static_cast<double>(e.values[i].real()), static_cast<double>(e.values[i].imag())) -
                   d.values[i]) <= 1e-10 * frobenius_norm(a));
  }
}

TEST_CASE("eig_hermitian: ascending values, orthonormal vectors") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
    const ComplexMatrix h = testing::random_hermitian(rng, n);
    const HermitianEigen<double> e = eig_hermitian(h);
    const double hn = frobenius_norm(h);
    Complex sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) CHECK(e.values[i - 1] <= e.values[i]);
      CHECK(residual(h, e.values[i], e.vectors[i]) <= 1e-10 * hn);
      sum += e.values[i];
      for (std::size_t k = 0; k < n; ++k) {
        Complex dot = 0.0;
        for (std::size_t r = 0; r < n; ++r) dot += std::conj(e.vectors[i][r]) * e.vectors[k][r];
        CHECK(std::abs(dot - (i == k ? 1.0 : 0.0)) <= 1e-10);
      }
    }
    CHECK(std::abs(sum - trace(h)) <= 1e-10 * hn);
  }
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
  ComplexMatrix a = ComplexMatrix::identity(3);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_hermitian(a), DomainError);
}

TEST_CASE("decoupled Hamiltonian spectrum") {
  const HermitianEigen<double> e = eig_hermitian(hamiltonian_at(testing::decoupled_params(), 0.3));
  CHECK(e.values[0] == doctest::Approx(-2.0));
  CHECK(e.values[1] == doctest::Approx(-2.0));
  for (std::size_t i = 2; i < 8; ++i) CHECK(std::abs(e.values[i]) <= 1e-15);
}

TEST_CASE("static reference Hamiltonian: both solvers agree") {
  const ComplexMatrix h = hamiltonian_at(testing::fig1_params(), 0.0);
  const HermitianEigen<double> he = eig_hermitian(h);
  const EigenPairs<double> ge = eig_general(h);
  std::vector<double> general;
  for (const Complex& v : ge.values) {
    CHECK(std::abs(v.imag()) <= 1e-10);
    general.push_back(v.real());
  }
  std::sort(general.begin(), general.end());
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(general[i] - he.values[i]) <= 1e-10 * frobenius_norm(h));
}
