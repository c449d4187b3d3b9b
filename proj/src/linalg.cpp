#include "trion/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace trion {

namespace {

template <class Real>
void require_dim(std::size_t dim) {
  if (dim == 0 || dim > kMaxMatrixDim) {
    throw DomainError("matrix dimension must be in 1..8, got " + std::to_string(dim));
  }
}

template <class Real>
std::string describe(const BasicMatrix<Real>& a) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t r = 0; r < a.dim(); ++r) {
    os << "\n  ";
    for (std::size_t c = 0; c < a.dim(); ++c) {
      const auto& v = a(r, c);
      os << '(' << static_cast<double>(v.real()) << ',' << static_cast<double>(v.imag()) << ") ";
    }
  }
  return os.str();
}

// Ordering for eig_general: descending modulus; values whose moduli agree to
// a relative 1e-12 are ordered by descending real, then imaginary part.
template <class Real>
bool eigen_before(const std::complex<Real>& a, const std::complex<Real>& b) {
  const Real ma = std::abs(a);
  const Real mb = std::abs(b);
  const Real scale = std::max<Real>(Real(1), std::max(ma, mb));
  if (std::abs(ma - mb) > Real(1e-12) * scale) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

// Householder reduction to upper Hessenberg form, A = Q H Q^dagger.
template <class Real>
void reduce_to_hessenberg(BasicMatrix<Real>& h, BasicMatrix<Real>& q) {
  using C = std::complex<Real>;
  const std::size_t n = h.dim();
  std::array<C, kMaxMatrixDim> v{};
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Real alpha = 0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += std::norm(h(i, k));
    alpha = std::sqrt(alpha);
    if (alpha == Real(0)) continue;

    const C x0 = h(k + 1, k);
    const C phase = std::abs(x0) > Real(0) ? x0 / std::abs(x0) : C(1);
    Real vnorm2 = 0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = h(i, k);
      if (i == k + 1) v[i] += phase * alpha;
      vnorm2 += std::norm(v[i]);
    }
    if (vnorm2 == Real(0)) continue;
    const Real beta = Real(2) / vnorm2;

    // Rows: H <- (I - beta v v^dagger) H
    for (std::size_t c = 0; c < n; ++c) {
      C s = 0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, c);
      s *= beta;
      for (std::size_t i = k + 1; i < n; ++i) h(i, c) -= v[i] * s;
    }
    // Columns: H <- H (I - beta v v^dagger), same for Q.
    for (std::size_t r = 0; r < n; ++r) {
      C s = 0, t = 0;
      for (std::size_t i = k + 1; i < n; ++i) {
        s += h(r, i) * v[i];
        t += q(r, i) * v[i];
      }
      s *= beta;
      t *= beta;
      for (std::size_t i = k + 1; i < n; ++i) {
        h(r, i) -= s * std::conj(v[i]);
        q(r, i) -= t * std::conj(v[i]);
      }
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0;
  }
}

template <class Real>
std::complex<Real> wilkinson_shift(const BasicMatrix<Real>& h, std::size_t hi) {
  using C = std::complex<Real>;
  const C a = h(hi - 1, hi - 1);
  const C b = h(hi - 1, hi);
  const C c = h(hi, hi - 1);
  const C d = h(hi, hi);
  const C half_diff = (a - d) / Real(2);
  const C disc = std::sqrt(half_diff * half_diff + b * c);
  const C mean = (a + d) / Real(2);
  const C l1 = mean + disc;
  const C l2 = mean - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

// One explicitly shifted QR step on the active block [lo, hi], applied to the
// whole matrix so that h converges to the Schur form of the original input.
template <class Real>
void qr_step(BasicMatrix<Real>& h, BasicMatrix<Real>& z, std::size_t lo, std::size_t hi,
             std::complex<Real> shift) {
  using C = std::complex<Real>;
  const std::size_t n = h.dim();
  std::array<C, kMaxMatrixDim> cs{}, sn{};

  for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= shift;

  for (std::size_t k = lo; k < hi; ++k) {
    const C x = h(k, k);
    const C y = h(k + 1, k);
    const Real r = std::hypot(std::abs(x), std::abs(y));
    if (r == Real(0)) {
      cs[k] = 1;
      sn[k] = 0;
      continue;
    }
    const C c = x / r;
    const C s = y / r;
    cs[k] = c;
    sn[k] = s;
    for (std::size_t col = k; col < n; ++col) {
      const C a = h(k, col);
      const C b = h(k + 1, col);
      h(k, col) = std::conj(c) * a + std::conj(s) * b;
      h(k + 1, col) = -s * a + c * b;
    }
    h(k + 1, k) = 0;
  }

  for (std::size_t k = lo; k < hi; ++k) {
    const C c = cs[k];
    const C s = sn[k];
    const std::size_t last_row = std::min(k + 1, hi);
    for (std::size_t row = 0; row <= last_row; ++row) {
      const C a = h(row, k);
      const C b = h(row, k + 1);
      h(row, k) = a * c + b * s;
      h(row, k + 1) = -a * std::conj(s) + b * std::conj(c);
    }
    for (std::size_t row = 0; row < n; ++row) {
      const C a = z(row, k);
      const C b = z(row, k + 1);
      z(row, k) = a * c + b * s;
      z(row, k + 1) = -a * std::conj(s) + b * std::conj(c);
    }
  }

  for (std::size_t k = lo; k <= hi; ++k) h(k, k) += shift;
}

}  // namespace

template <class Real>
BasicMatrix<Real>::BasicMatrix(std::size_t dim) : dim_(dim) {
  require_dim<Real>(dim);
}

template <class Real>
BasicMatrix<Real> BasicMatrix<Real>::identity(std::size_t dim) {
  BasicMatrix out(dim);
  for (std::size_t i = 0; i < dim; ++i) out(i, i) = Scalar(1);
  return out;
}

template <class Real>
BasicMatrix<Real>& BasicMatrix<Real>::operator+=(const BasicMatrix& other) {
  if (other.dim_ != dim_) throw DomainError("matrix sum: dimension mismatch");
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) (*this)(r, c) += other(r, c);
  return *this;
}

template <class Real>
BasicMatrix<Real>& BasicMatrix<Real>::operator-=(const BasicMatrix& other) {
  if (other.dim_ != dim_) throw DomainError("matrix difference: dimension mismatch");
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) (*this)(r, c) -= other(r, c);
  return *this;
}

template <class Real>
BasicMatrix<Real>& BasicMatrix<Real>::operator*=(Scalar factor) {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) (*this)(r, c) *= factor;
  return *this;
}

template <class Real>
bool BasicMatrix<Real>::all_finite() const {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) {
      const Scalar& v = (*this)(r, c);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  return true;
}

template <class Real>
BasicMatrix<Real> matmul(const BasicMatrix<Real>& a, const BasicMatrix<Real>& b) {
  if (a.dim() != b.dim()) {
    throw DomainError("matmul: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
  const std::size_t n = a.dim();
  BasicMatrix<Real> out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const auto ark = a(r, k);
      if (ark == std::complex<Real>(0)) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

template <class Real>
BasicMatrix<Real> adjoint(const BasicMatrix<Real>& a) {
  BasicMatrix<Real> out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

template <class Real>
std::vector<std::complex<Real>> apply(const BasicMatrix<Real>& a, std::span<const std::complex<Real>> v) {
  if (v.size() != a.dim()) throw DomainError("apply: vector length does not match matrix dimension");
  std::vector<std::complex<Real>> out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out[r] += a(r, c) * v[c];
  return out;
}

template <class Real>
Real frobenius_norm(const BasicMatrix<Real>& a) {
  Real s = 0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

template <class Real>
std::complex<Real> trace(const BasicMatrix<Real>& a) {
  std::complex<Real> s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a(i, i);
  return s;
}

template <class Real>
Real unitarity_defect(const BasicMatrix<Real>& a) {
  return frobenius_norm(matmul(adjoint(a), a) - BasicMatrix<Real>::identity(a.dim()));
}

template <class Real>
EigenPairs<Real> eig_general(const BasicMatrix<Real>& a, bool want_vectors) {
  using C = std::complex<Real>;
  const std::size_t n = a.dim();
  require_dim<Real>(n);
  if (!a.all_finite()) throw NumericalFailure("eig_general: non-finite input");

  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real anorm = frobenius_norm(a);

  BasicMatrix<Real> h = a;
  BasicMatrix<Real> z = BasicMatrix<Real>::identity(n);
  reduce_to_hessenberg(h, z);

  const std::size_t max_iterations = 100 * n * n;
  std::size_t total = 0;
  std::size_t since_deflation = 0;
  std::size_t hi = n - 1;
  while (hi > 0) {
    std::size_t lo = hi;
    while (lo > 0) {
      Real s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (s == Real(0)) s = anorm;
      if (std::abs(h(lo, lo - 1)) <= eps * s) {
        h(lo, lo - 1) = 0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (++total > max_iterations) {
      throw NumericalFailure("eig_general: QR iteration did not converge; iterate:" + describe(h));
    }
    C shift;
    if (since_deflation > 0 && since_deflation % 10 == 0) {
      // Exceptional shift to break cycles.
      shift = h(hi, hi) + C(std::abs(h(hi, hi - 1).real()) + std::abs(h(hi, hi - 1).imag()), 0);
    } else {
      shift = wilkinson_shift(h, hi);
    }
    ++since_deflation;
    qr_step(h, z, lo, hi, shift);
  }

  std::vector<C> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = h(i, i);

  std::vector<std::vector<C>> vectors;
  if (want_vectors) {
    const Real tnorm = std::max(frobenius_norm(h), std::numeric_limits<Real>::min());
    const Real small = eps * tnorm;
    vectors.assign(n, std::vector<C>(n));
    for (std::size_t k = 0; k < n; ++k) {
      std::array<C, kMaxMatrixDim> y{};
      y[k] = 1;
      for (std::size_t i = k; i-- > 0;) {
        C s = 0;
        for (std::size_t j = i + 1; j <= k; ++j) s += h(i, j) * y[j];
        C d = h(i, i) - h(k, k);
        if (std::abs(d) < small) d = small;
        y[i] = -s / d;
      }
      Real norm2 = 0;
      std::vector<C>& v = vectors[k];
      for (std::size_t r = 0; r < n; ++r) {
        C acc = 0;
        for (std::size_t j = 0; j <= k; ++j) acc += z(r, j) * y[j];
        v[r] = acc;
        norm2 += std::norm(acc);
      }
      const Real inv = Real(1) / std::sqrt(norm2);
      for (auto& x : v) x *= inv;
    }
  }

  // Insertion sort: stable and safe with the tolerance-based comparison.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t key = order[i];
    std::size_t j = i;
    while (j > 0 && eigen_before(values[key], values[order[j - 1]])) {
      order[j] = order[j - 1];
      --j;
    }
    order[j] = key;
  }

  EigenPairs<Real> out;
  out.values.reserve(n);
  for (std::size_t i : order) out.values.push_back(values[i]);
  if (want_vectors) {
    out.vectors.reserve(n);
    for (std::size_t i : order) out.vectors.push_back(std::move(vectors[i]));
  }
  return out;
}

template <class Real>
HermitianEigen<Real> eig_hermitian(const BasicMatrix<Real>& input) {
  using C = std::complex<Real>;
  const std::size_t n = input.dim();
  require_dim<Real>(n);
  if (!input.all_finite()) throw NumericalFailure("eig_hermitian: non-finite input");
  const Real anorm = frobenius_norm(input);
  if (frobenius_norm(input - adjoint(input)) > Real(1e-12) * anorm) {
    throw DomainError("eig_hermitian: matrix is not Hermitian");
  }

  BasicMatrix<Real> a = input;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = C(a(i, i).real(), 0);
  BasicMatrix<Real> v = BasicMatrix<Real>::identity(n);

  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    Real off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= eps * anorm * Real(0.01) || off == Real(0)) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const C g = a(p, q);
        const Real mag = std::abs(g);
        if (mag == Real(0)) continue;
        const C u = g / mag;
        const Real theta = (a(q, q).real() - a(p, p).real()) / (Real(2) * mag);
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + std::sqrt(theta * theta + Real(1)));
        const Real c = Real(1) / std::sqrt(Real(1) + t * t);
        const Real s = t * c;
        const C r_pp = c;
        const C r_pq = s;
        const C r_qp = -s * std::conj(u);
        const C r_qq = c * std::conj(u);

        for (std::size_t i = 0; i < n; ++i) {
          const C x = a(i, p);
          const C y = a(i, q);
          a(i, p) = x * r_pp + y * r_qp;
          a(i, q) = x * r_pq + y * r_qq;
          const C vx = v(i, p);
          const C vy = v(i, q);
          v(i, p) = vx * r_pp + vy * r_qp;
          v(i, q) = vx * r_pq + vy * r_qq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const C x = a(p, j);
          const C y = a(q, j);
          a(p, j) = std::conj(r_pp) * x + std::conj(r_qp) * y;
          a(q, j) = std::conj(r_pq) * x + std::conj(r_qq) * y;
        }
        a(p, q) = 0;
        a(q, p) = 0;
        a(p, p) = C(a(p, p).real(), 0);
        a(q, q) = C(a(q, q).real(), 0);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigen<Real> out;
  for (std::size_t k : order) {
    out.values.push_back(a(k, k).real());
    std::vector<C> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = v(r, k);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

#define TRION_INSTANTIATE_LINALG(Real)                                                              \
  template class BasicMatrix<Real>;                                                                \
  template BasicMatrix<Real> matmul(const BasicMatrix<Real>&, const BasicMatrix<Real>&);          \
  template BasicMatrix<Real> adjoint(const BasicMatrix<Real>&);                                   \
  template std::vector<std::complex<Real>> apply(const BasicMatrix<Real>&,                         \
                                                 std::span<const std::complex<Real>>);             \
  template Real frobenius_norm(const BasicMatrix<Real>&);                                         \
  template std::complex<Real> trace(const BasicMatrix<Real>&);                                    \
  template Real unitarity_defect(const BasicMatrix<Real>&);                                       \
  template EigenPairs<Real> eig_general(const BasicMatrix<Real>&, bool);                          \
  template HermitianEigen<Real> eig_hermitian(const BasicMatrix<Real>&);

TRION_INSTANTIATE_LINALG(double)
TRION_INSTANTIATE_LINALG(long double)

#undef TRION_INSTANTIATE_LINALG

}  // namespace trion
