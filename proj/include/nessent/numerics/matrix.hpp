#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "nessent/errors.hpp"

namespace nessent {

/// Dense square complex matrix, row-major.
///
/// `hermitian_hint` records that the producer built the matrix as Hermitian;
/// the Hermitian eigensolver verifies it before trusting it.
template <class Real>
class BasicComplexMatrix {
 public:
  using real_type = Real;
  using value_type = std::complex<Real>;

  BasicComplexMatrix() = default;

  explicit BasicComplexMatrix(std::size_t dim, bool hermitian_hint = false)
      : dim_(dim), data_(dim * dim), hermitian_hint_(hermitian_hint) {}

  BasicComplexMatrix(std::initializer_list<std::initializer_list<value_type>> rows,
                     bool hermitian_hint = false)
      : dim_(rows.size()), data_(rows.size() * rows.size()), hermitian_hint_(hermitian_hint) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != dim_) throw DomainError("matrix rows must all have length dim");
      std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
      ++i;
    }
  }

  static BasicComplexMatrix identity(std::size_t dim) {
    BasicComplexMatrix m(dim, true);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = Real(1);
    return m;
  }

  static BasicComplexMatrix diagonal(std::span<const value_type> d) {
    BasicComplexMatrix m(d.size());
    bool real_diag = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
      m(i, i) = d[i];
      real_diag = real_diag && d[i].imag() == Real(0);
    }
    m.hermitian_hint_ = real_diag;
    return m;
  }

  static BasicComplexMatrix diagonal(std::initializer_list<value_type> d) {
    std::vector<value_type> v(d);
    return diagonal(std::span<const value_type>(v));
  }

  std::size_t dim() const noexcept { return dim_; }
  bool hermitian_hint() const noexcept { return hermitian_hint_; }
  void set_hermitian_hint(bool h) noexcept { hermitian_hint_ = h; }

  value_type& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * dim_ + j]; }
  const value_type& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * dim_ + j];
  }

  std::span<value_type> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
  std::span<const value_type> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  std::span<const value_type> data() const noexcept { return data_; }
  std::span<value_type> data() noexcept { return data_; }

  value_type trace() const noexcept {
    value_type t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  Real max_abs() const noexcept {
    Real m = 0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  /// max_ij |M_ij - conj(M_ji)|
  Real hermiticity_defect() const noexcept {
    Real m = 0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

  BasicComplexMatrix adjoint() const {
    BasicComplexMatrix a(dim_, hermitian_hint_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) a(j, i) = std::conj((*this)(i, j));
    return a;
  }

  /// Principal submatrix on the given index list (order preserved).
  BasicComplexMatrix submatrix(std::span<const std::size_t> idx) const {
    BasicComplexMatrix s(idx.size(), hermitian_hint_);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = (*this)(idx[a], idx[b]);
    return s;
  }

  BasicComplexMatrix& operator+=(const BasicComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    hermitian_hint_ = hermitian_hint_ && o.hermitian_hint_;
    return *this;
  }
  BasicComplexMatrix& operator-=(const BasicComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    hermitian_hint_ = hermitian_hint_ && o.hermitian_hint_;
    return *this;
  }
  BasicComplexMatrix& operator*=(value_type s) {
    for (auto& z : data_) z *= s;
    hermitian_hint_ = hermitian_hint_ && s.imag() == Real(0);
    return *this;
  }

  friend BasicComplexMatrix operator+(BasicComplexMatrix a, const BasicComplexMatrix& b) {
    return a += b;
  }
  friend BasicComplexMatrix operator-(BasicComplexMatrix a, const BasicComplexMatrix& b) {
    return a -= b;
  }
  friend BasicComplexMatrix operator*(value_type s, BasicComplexMatrix a) { return a *= s; }

  template <class Other>
  BasicComplexMatrix<Other> cast() const {
    BasicComplexMatrix<Other> out(dim_, hermitian_hint_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        out(i, j) = std::complex<Other>(static_cast<Other>((*this)(i, j).real()),
                                        static_cast<Other>((*this)(i, j).imag()));
    return out;
  }

 private:
  void require_same_dim(const BasicComplexMatrix& o) const {
    if (o.dim_ != dim_) throw DomainError("matrix dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<value_type> data_;
  bool hermitian_hint_ = false;
};

using ComplexMatrix = BasicComplexMatrix<double>;
using complex = std::complex<double>;

template <class Real>
BasicComplexMatrix<Real> mat_mul(const BasicComplexMatrix<Real>& a,
                                 const BasicComplexMatrix<Real>& b) {
  if (a.dim() != b.dim()) throw DomainError("mat_mul: dimension mismatch");
  const std::size_t n = a.dim();
  BasicComplexMatrix<Real> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      const auto aik = a(i, k);
      if (aik == std::complex<Real>{}) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

/// LU inverse with partial pivoting. Throws Singular when a pivot falls below
/// 1e-12 * max|M|, which is the practical proxy for a vanishing singular value.
template <class Real>
BasicComplexMatrix<Real> mat_inverse(const BasicComplexMatrix<Real>& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw DomainError("mat_inverse: empty matrix");
  const Real scale = m.max_abs();
  if (scale == Real(0)) throw Singular("mat_inverse: zero matrix");
  const Real pivot_floor = Real(1e-12) * scale;

  BasicComplexMatrix<Real> lu = m;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    Real best = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const Real v = std::abs(lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best <= pivot_floor) throw Singular("mat_inverse: matrix is numerically singular");
    if (p != k) {
      std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(p).begin());
      std::swap(perm[k], perm[p]);
    }
    const auto pivot = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const auto f = lu(i, k) / pivot;
      lu(i, k) = f;
      if (f == std::complex<Real>{}) continue;
      auto ri = lu.row(i);
      auto rk = lu.row(k);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }

  BasicComplexMatrix<Real> inv(n);
  std::vector<std::complex<Real>> col(n);
  for (std::size_t c = 0; c < n; ++c) {
    // Solve L U x = P e_c.
    for (std::size_t i = 0; i < n; ++i) col[i] = perm[i] == c ? Real(1) : Real(0);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = col[i];
      for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * col[j];
      col[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      auto s = col[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * col[j];
      col[ii] = s / lu(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, c) = col[i];
  }
  return inv;
}

/// Cholesky factor L (lower, L L^H = M) of a Hermitian positive definite
/// matrix. Throws Singular when a pivot is not positive.
template <class Real>
BasicComplexMatrix<Real> cholesky_lower(const BasicComplexMatrix<Real>& m) {
  const std::size_t n = m.dim();
  const Real floor = Real(1e-12) * std::max(m.max_abs(), Real(1));
  BasicComplexMatrix<Real> l(n);
  for (std::size_t j = 0; j < n; ++j) {
    Real d = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > floor)) throw Singular("cholesky_lower: matrix is not positive definite");
    const Real djj = std::sqrt(d);
    l(j, j) = djj;
    for (std::size_t i = j + 1; i < n; ++i) {
      std::complex<Real> s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / djj;
    }
  }
  return l;
}

/// Inverse of a lower-triangular matrix by forward substitution.
template <class Real>
BasicComplexMatrix<Real> lower_triangular_inverse(const BasicComplexMatrix<Real>& l) {
  const std::size_t n = l.dim();
  BasicComplexMatrix<Real> inv(n);
  for (std::size_t c = 0; c < n; ++c) {
    inv(c, c) = Real(1) / l(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      std::complex<Real> s{};
      for (std::size_t k = c; k < i; ++k) s += l(i, k) * inv(k, c);
      inv(i, c) = -s / l(i, i);
    }
  }
  return inv;
}

}  // namespace nessent
