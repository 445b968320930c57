#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "nessent/errors.hpp"
#include "nessent/numerics/matrix.hpp"

namespace nessent {

namespace detail {

template <class Real>
Real hermitian_tolerance(const BasicComplexMatrix<Real>& m) {
  return Real(1e-10) * std::max(m.max_abs(), Real(1));
}

// Eigenvalues of the real symmetric tridiagonal matrix (d, e) by implicit QL
// with Wilkinson shifts. e[i] couples d[i] and d[i+1]; e[n-1] is scratch.
template <class Real>
void tridiagonal_ql(std::vector<Real>& d, std::vector<Real>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n);
  e[n - 1] = 0;
  const Real eps = std::numeric_limits<Real>::epsilon();
  // Clusters of eigenvalues near zero make the relative test unreachable, so
  // couplings below eps * ||T|| also count as negligible.
  Real tnorm = 0;
  for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i]));
  const Real floor = eps * tnorm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const Real dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::max(eps * dd, floor)) break;
      }
      if (m != l) {
        if (++iter > 100) throw NonConvergence("eig_hermitian: QL iteration did not converge");
        Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
        Real r = std::hypot(g, Real(1));
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? r : -r));
        Real s = 1, c = 1, p = 0;
        std::size_t i;
        bool underflow = false;
        for (i = m; i-- > l;) {
          Real f = s * e[i];
          const Real b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == Real(0)) {
            d[i + 1] -= p;
            e[m] = 0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + Real(2) * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Householder reduction to real tridiagonal form followed by implicit QL.
/// Input within 1e-10 * max|M| of Hermitian is symmetrized first; anything
/// further off raises NotHermitian.
template <class Real>
std::vector<Real> eig_hermitian(const BasicComplexMatrix<Real>& m) {
  using C = std::complex<Real>;
  const std::size_t n = m.dim();
  if (n == 0) throw DomainError("eig_hermitian: empty matrix");
  if (m.hermiticity_defect() > detail::hermitian_tolerance(m))
    throw NotHermitian("eig_hermitian: matrix is not Hermitian within tolerance");

  BasicComplexMatrix<Real> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = C(m(i, i).real(), 0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const C v = Real(0.5) * (m(i, j) + std::conj(m(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }

  std::vector<Real> diag(n), off(n, Real(0));
  std::vector<C> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // Householder vector annihilating a(k+2:n, k).
    Real norm2 = 0;
    for (std::size_t i = k + 1; i < n; ++i) norm2 += std::norm(a(i, k));
    const Real norm = std::sqrt(norm2);
    if (norm == Real(0)) continue;
    const C x0 = a(k + 1, k);
    const C phase = std::abs(x0) > Real(0) ? x0 / std::abs(x0) : C(1);
    const C alpha = -phase * norm;
    for (std::size_t i = 0; i < n; ++i) v[i] = C{};
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    Real vnorm2 = 0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == Real(0)) continue;
    const Real tau = Real(2) / vnorm2;

    // p = tau * A v on the trailing block (rows/cols k..n-1 are touched).
    for (std::size_t i = k; i < n; ++i) {
      C s{};
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      p[i] = tau * s;
    }
    C vp{};
    for (std::size_t i = k + 1; i < n; ++i) vp += std::conj(v[i]) * p[i];
    const Real kk = Real(0.5) * tau * vp.real();
    for (std::size_t i = k; i < n; ++i) p[i] -= kk * v[i];
    // A <- A - v p^H - p v^H
    for (std::size_t i = k; i < n; ++i) {
      for (std::size_t j = k; j < n; ++j)
        a(i, j) -= v[i] * std::conj(p[j]) + p[i] * std::conj(v[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = std::abs(a(i + 1, i));

  detail::tridiagonal_ql(diag, off);
  std::sort(diag.begin(), diag.end());
  return diag;
}

/// Eigenvalues of a general complex matrix (unordered multiset).
///
/// Householder reduction to upper Hessenberg form, then single-shift complex
/// QR with Wilkinson shifts and deflation. No eigenvectors are formed.
template <class Real>
std::vector<std::complex<Real>> eig_general(const BasicComplexMatrix<Real>& m) {
  using C = std::complex<Real>;
  const std::size_t n = m.dim();
  if (n == 0) throw DomainError("eig_general: empty matrix");
  if (n == 1) return {m(0, 0)};

  BasicComplexMatrix<Real> h = m;
  std::vector<C> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Real norm2 = 0;
    for (std::size_t i = k + 1; i < n; ++i) norm2 += std::norm(h(i, k));
    const Real norm = std::sqrt(norm2);
    if (norm == Real(0)) continue;
    const C x0 = h(k + 1, k);
    const C phase = std::abs(x0) > Real(0) ? x0 / std::abs(x0) : C(1);
    const C alpha = -phase * norm;
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
    Real vnorm2 = 0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == Real(0)) continue;
    const Real tau = Real(2) / vnorm2;
    // Left: H <- (I - tau v v^H) H
    for (std::size_t j = k; j < n; ++j) {
      C s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      s *= tau;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
    }
    // Right: H <- H (I - tau v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      C s{};
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = C{};
  }

  const Real eps = std::numeric_limits<Real>::epsilon();
  // Eigenvalue clusters near zero make the local test too strict; a
  // subdiagonal below eps * ||H|| is a backward-stable deflation as well.
  Real hnorm = 0;
  for (const auto& z : h.data()) hnorm += std::norm(z);
  const Real small = std::max(eps * std::sqrt(hnorm), std::numeric_limits<Real>::min() / eps);
  std::vector<C> eig(n);
  std::vector<Real> cs(n);
  std::vector<C> sn(n);

  std::size_t hi = n - 1;
  int iter = 0;
  const int max_iter = 60;
  while (true) {
    // Deflation scan.
    std::size_t lo = hi;
    while (lo > 0) {
      const Real tst = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (std::abs(h(lo, lo - 1)) <= std::max(eps * tst, small)) {
        h(lo, lo - 1) = C{};
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      iter = 0;
      if (hi == 0) break;
      --hi;
      continue;
    }
    if (++iter > max_iter) throw NonConvergence("eig_general: QR iteration did not converge");

    // Wilkinson shift from the trailing 2x2 block; exceptional shifts break cycles.
    C mu;
    if (iter % 11 == 0) {
      mu = h(hi, hi) + Real(0.75) * std::abs(h(hi, hi - 1));
    } else {
      const C a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
      const C tr = a + d;
      const C disc = std::sqrt((a - d) * (a - d) + Real(4) * b * c);
      const C l1 = Real(0.5) * (tr + disc), l2 = Real(0.5) * (tr - disc);
      mu = std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
    }

    for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
    // QR on the active block with Givens rotations.
    for (std::size_t k = lo; k < hi; ++k) {
      const C x = h(k, k), y = h(k + 1, k);
      const Real r = std::hypot(std::abs(x), std::abs(y));
      Real c;
      C s;
      if (r == Real(0)) {
        c = 1;
        s = C{};
      } else {
        c = std::abs(x) / r;
        const C phase = std::abs(x) > Real(0) ? x / std::abs(x) : C(1);
        s = phase * std::conj(y) / r;
      }
      cs[k] = c;
      sn[k] = s;
      // [c s; -conj(s) c] applied to rows k, k+1
      for (std::size_t j = k; j <= hi; ++j) {
        const C t1 = h(k, j), t2 = h(k + 1, j);
        h(k, j) = c * t1 + s * t2;
        h(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const Real c = cs[k];
      const C s = sn[k];
      const std::size_t top = std::min(k + 2, hi);
      for (std::size_t i = lo; i <= top; ++i) {
        const C t1 = h(i, k), t2 = h(i, k + 1);
        h(i, k) = c * t1 + std::conj(s) * t2;
        h(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
  }
  return eig;
}

}  // namespace nessent
