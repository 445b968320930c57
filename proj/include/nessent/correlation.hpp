#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nessent/errors.hpp"
#include "nessent/numerics/matrix.hpp"
#include "nessent/numerics/quadrature.hpp"
#include "nessent/scattering.hpp"

namespace nessent {

/// Two intervals on opposite sides of the scatterer.
///
/// A_R holds sites m0 + d_R + j and A_L holds sites -m0 - d_L - j for
/// j = 1 .. ell, so both blocks are indexed outward from the scatterer.
struct SubsystemGeometry {
  long m0 = 0;
  long d_L = 0;
  long ell_L = 1;
  long d_R = 0;
  long ell_R = 1;

  void validate() const {
    if (m0 < 0 || d_L < 0 || d_R < 0) throw GeometryError("geometry: m0, d_L, d_R must be >= 0");
    if (ell_L < 1 || ell_R < 1) throw GeometryError("geometry: ell_L and ell_R must be >= 1");
  }

  static SubsystemGeometry symmetric(long ell, long d, long m0 = 0) {
    return {m0, d, ell, d, ell};
  }

  std::array<long, 4> sorted_lengths() const {
    std::array<long, 4> m{d_L, d_L + ell_L, d_R, d_R + ell_R};
    std::sort(m.begin(), m.end());
    return m;
  }

  std::vector<long> sites_L() const {
    std::vector<long> s(static_cast<std::size_t>(ell_L));
    for (long j = 1; j <= ell_L; ++j) s[static_cast<std::size_t>(j - 1)] = -m0 - d_L - j;
    return s;
  }
  std::vector<long> sites_R() const {
    std::vector<long> s(static_cast<std::size_t>(ell_R));
    for (long j = 1; j <= ell_R; ++j) s[static_cast<std::size_t>(j - 1)] = m0 + d_R + j;
    return s;
  }
};

struct MirrorOverlap {
  long ell_mirror;
  long delta_ell_L;
  long delta_ell_R;
};

inline MirrorOverlap mirror_overlap(const SubsystemGeometry& g) {
  const long lo = std::max(g.d_L, g.d_R);
  const long hi = std::min(g.d_L + g.ell_L, g.d_R + g.ell_R);
  const long mirror = std::max(hi - lo, 0L);
  return {mirror, g.ell_L - mirror, g.ell_R - mirror};
}

enum class Regime { finite_distance, far_limit };
enum class Subsystem { A_L, A_R, A };

/// Restricted correlation matrix (C)_{ab} = <c_a^dagger c_b>.
///
/// Rows are ordered with the A_L sites first, then the A_R sites; either list
/// may be empty.
struct CorrelationMatrix {
  ComplexMatrix matrix;
  std::vector<long> sites_L;
  std::vector<long> sites_R;
  Regime regime = Regime::far_limit;

  std::size_t size_L() const noexcept { return sites_L.size(); }
  std::size_t size_R() const noexcept { return sites_R.size(); }

  ComplexMatrix block_L() const { return matrix.submatrix(range(0, size_L())); }
  ComplexMatrix block_R() const { return matrix.submatrix(range(size_L(), size_R())); }

  CorrelationMatrix restrict_to(Subsystem which) const {
    if (which == Subsystem::A) return *this;
    CorrelationMatrix c;
    c.regime = regime;
    if (which == Subsystem::A_L) {
      c.matrix = block_L();
      c.sites_L = sites_L;
    } else {
      c.matrix = block_R();
      c.sites_R = sites_R;
    }
    return c;
  }

 private:
  static std::vector<std::size_t> range(std::size_t start, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = start + i;
    return idx;
  }
};

namespace detail {

constexpr double two_pi = 2 * std::numbers::pi;

// <c_a^dagger c_b> = sum over the two reservoirs of integrals of
// coef(k) exp(i k X(a, b)). With k > 0 from the left lead,
//   u_a = alpha_a e^{ika} + beta_a e^{-ika},
// and with q = -k > 0 from the right lead,
//   u_a = gamma_a e^{-iqa} + delta_a e^{iqa}.
// R side: alpha = t_L, beta = 0, gamma = 1, delta = r_R.
// L side: alpha = 1, beta = r_L, gamma = t_R, delta = 0.
enum class Phase { b_minus_a, a_minus_b, a_plus_b, minus_a_plus_b };

inline long phase_of(Phase p, long a, long b) {
  switch (p) {
    case Phase::b_minus_a: return b - a;
    case Phase::a_minus_b: return a - b;
    case Phase::a_plus_b: return a + b;
    case Phase::minus_a_plus_b: return -(a + b);
  }
  return 0;
}

struct Term {
  bool from_left;  // integrate over (0, k_FL) if true, else (0, k_FR)
  Phase phase;
  std::function<cplx(const SMatrix&)> coef;
};

inline std::vector<Term> terms_for(bool a_right, bool b_right) {
  using F = std::function<cplx(const SMatrix&)>;
  auto alpha = [](bool right) -> F {
    if (right) return [](const SMatrix& s) { return s.t_L; };
    return [](const SMatrix&) { return cplx(1.0); };
  };
  auto gamma = [](bool right) -> F {
    if (right) return [](const SMatrix&) { return cplx(1.0); };
    return [](const SMatrix& s) { return s.t_R; };
  };
  // beta vanishes on the right, delta on the left.
  auto beta = [](const SMatrix& s) { return s.r_L; };
  auto delta = [](const SMatrix& s) { return s.r_R; };

  std::vector<Term> out;
  const F aa = alpha(a_right), ab = alpha(b_right);
  const F ga = gamma(a_right), gb = gamma(b_right);
  out.push_back({true, Phase::b_minus_a,
                 [aa, ab](const SMatrix& s) { return std::conj(aa(s)) * ab(s); }});
  if (!b_right)
    out.push_back({true, Phase::minus_a_plus_b,
                   [aa, beta](const SMatrix& s) { return std::conj(aa(s)) * beta(s); }});
  if (!a_right)
    out.push_back({true, Phase::a_plus_b,
                   [ab, beta](const SMatrix& s) { return std::conj(beta(s)) * ab(s); }});
  if (!a_right && !b_right)
    out.push_back({true, Phase::a_minus_b, [beta](const SMatrix& s) { return std::norm(beta(s)); }});

  out.push_back({false, Phase::a_minus_b,
                 [ga, gb](const SMatrix& s) { return std::conj(ga(s)) * gb(s); }});
  if (b_right)
    out.push_back({false, Phase::a_plus_b,
                   [ga, delta](const SMatrix& s) { return std::conj(ga(s)) * delta(s); }});
  if (a_right)
    out.push_back({false, Phase::minus_a_plus_b,
                   [gb, delta](const SMatrix& s) { return std::conj(delta(s)) * gb(s); }});
  if (a_right && b_right)
    out.push_back({false, Phase::b_minus_a, [delta](const SMatrix& s) { return std::norm(delta(s)); }});
  return out;
}

inline void check_site(const ScatteringModel& model, long site) {
  if (std::abs(site) <= model.m0())
    throw DomainError("correlation: site " + std::to_string(site) + " lies inside the scatterer");
}

// Integral of exp(-i k x) dk / 2pi over [k1, k2].
inline cplx plane_window(double k1, double k2, long x) {
  if (x == 0) return (k2 - k1) / two_pi;
  const double xd = static_cast<double>(x);
  return (std::polar(1.0, -k2 * xd) - std::polar(1.0, -k1 * xd)) / cplx(0, -xd * two_pi);
}

// sin(kF x) / (pi x): the filled sea on [-kF, kF].
inline double sea_kernel(double kF, long x) {
  if (x == 0) return kF / std::numbers::pi;
  const double xd = static_cast<double>(x);
  return std::sin(kF * xd) / (std::numbers::pi * xd);
}

struct MomentTable {
  long x0 = 0;
  std::vector<cplx> v;
  cplx at(long x) const { return v[static_cast<std::size_t>(x - x0)]; }
};

template <class G>
MomentTable moment_table(G&& g, double a, double b, long xmin, long xmax,
                         const QuadratureSpec& spec) {
  MomentTable t;
  t.x0 = xmin;
  t.v = fourier_moments(g, a, b, xmin, static_cast<std::size_t>(xmax - xmin + 1), spec);
  return t;
}

}  // namespace detail

/// <c_j^dagger c_m> at finite distance, one oscillatory quadrature per term.
inline cplx correlation_entry_finite(const ScatteringModel& model, const BiasState& bias, long j,
                                     long m, const QuadratureSpec& spec = {}) {
  detail::check_site(model, j);
  detail::check_site(model, m);
  const auto terms = detail::terms_for(j > 0, m > 0);
  cplx total{};
  for (const auto& term : terms) {
    const double kmax = term.from_left ? bias.k_FL : bias.k_FR;
    const long x = detail::phase_of(term.phase, j, m);
    auto f = [&](double k) { return term.coef(s_matrix(model, k)); };
    total += integrate_oscillatory(f, static_cast<double>(x), 0.0, kmax, spec);
  }
  return total / detail::two_pi;
}

namespace detail {

inline CorrelationMatrix make_shell(const SubsystemGeometry& geom, Subsystem which, Regime regime) {
  geom.validate();
  CorrelationMatrix c;
  c.regime = regime;
  if (which != Subsystem::A_R) c.sites_L = geom.sites_L();
  if (which != Subsystem::A_L) c.sites_R = geom.sites_R();
  c.matrix = ComplexMatrix(c.sites_L.size() + c.sites_R.size(), true);
  return c;
}

// Fill the (rows x cols) block at the given offsets; when `diagonal` only the
// upper triangle is computed and mirrored by conjugation.
template <class Entry>
void fill_block(ComplexMatrix& M, std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc,
                bool diagonal, Entry&& entry) {
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = diagonal ? i : 0; j < nc; ++j) {
      cplx v = entry(i, j);
      if (diagonal && i == j) v = cplx(v.real(), 0);
      M(r0 + i, c0 + j) = v;
      M(c0 + j, r0 + i) = std::conj(v);
    }
  }
}

}  // namespace detail

/// Finite-distance correlation matrix, assembled from batched Fourier
/// moments of every scattering term.
inline CorrelationMatrix correlation_matrix_finite(const ScatteringModel& model,
                                                   const BiasState& bias,
                                                   const SubsystemGeometry& geom, Subsystem which,
                                                   const QuadratureSpec& spec = {}) {
  using namespace detail;
  CorrelationMatrix c = make_shell(geom, which, Regime::finite_distance);
  const std::size_t nL = c.sites_L.size();

  auto block = [&](const std::vector<long>& A, const std::vector<long>& B, std::size_t r0,
                   std::size_t c0, bool diagonal) {
    if (A.empty() || B.empty()) return;
    for (long s : A) check_site(model, s);
    for (long s : B) check_site(model, s);
    const auto terms = terms_for(A.front() > 0, B.front() > 0);
    std::vector<MomentTable> tables;
    for (const auto& term : terms) {
      const auto [amin, amax] = std::minmax_element(A.begin(), A.end());
      const auto [bmin, bmax] = std::minmax_element(B.begin(), B.end());
      const std::array<long, 4> corners{phase_of(term.phase, *amin, *bmin),
                                        phase_of(term.phase, *amin, *bmax),
                                        phase_of(term.phase, *amax, *bmin),
                                        phase_of(term.phase, *amax, *bmax)};
      const long xmin = *std::min_element(corners.begin(), corners.end());
      const long xmax = *std::max_element(corners.begin(), corners.end());
      const double kmax = term.from_left ? bias.k_FL : bias.k_FR;
      auto g = [&](double k) { return term.coef(s_matrix(model, k)); };
      tables.push_back(moment_table(g, 0.0, kmax, xmin, xmax, spec));
    }
    fill_block(c.matrix, r0, c0, A.size(), B.size(), diagonal, [&](std::size_t i, std::size_t j) {
      cplx v{};
      for (std::size_t t = 0; t < terms.size(); ++t)
        v += tables[t].at(phase_of(terms[t].phase, A[i], B[j]));
      return v / two_pi;
    });
  };

  block(c.sites_L, c.sites_L, 0, 0, true);
  block(c.sites_R, c.sites_R, nL, nL, true);
  block(c.sites_L, c.sites_R, 0, nL, false);
  c.matrix.set_hermitian_hint(true);
  return c;
}

/// Far-limit correlation matrix (d_i much larger than ell_i, d_L - d_R fixed).
///
/// Terms whose phase grows with d_i are dropped. What remains is block
/// Toeplitz in the outward indices: each within-block entry is a filled sea
/// up to min(k_FL, k_FR) plus a voltage-window integral, and the cross block
/// is supported on the window only.
inline CorrelationMatrix correlation_matrix_far(const ScatteringModel& model,
                                                const BiasState& bias,
                                                const SubsystemGeometry& geom, Subsystem which,
                                                const QuadratureSpec& spec = {}) {
  using namespace detail;
  CorrelationMatrix c = make_shell(geom, which, Regime::far_limit);
  const std::size_t nL = c.sites_L.size(), nR = c.sites_R.size();
  const bool left_higher = bias.k_FL >= bias.k_FR;
  const double k1 = bias.k_minus(), k2 = bias.k_plus();
  const long span = static_cast<long>(std::max(nL, nR));

  // Window tables indexed by x = j - m, integrand g(k) exp(-i k x).
  auto window_table = [&](auto&& g) {
    MomentTable t;
    t.x0 = -(span - 1);
    if (k2 > k1) {
      auto m = fourier_moments(g, k1, k2, -(span - 1), static_cast<std::size_t>(2 * span - 1), spec);
      // fourier_moments uses exp(+ikX); flip X -> -x.
      t.v.assign(m.rbegin(), m.rend());
    } else {
      t.v.assign(static_cast<std::size_t>(2 * span - 1), cplx{});
    }
    return t;
  };
  auto T = [&](double k) { return cplx(transmission(model, k)); };
  auto R = [&](double k) { return cplx(reflection(model, k)); };

  // The reservoir with the higher Fermi momentum sees its incoming wave plus
  // its reflection in the window; the other side sees the transmitted part.
  const MomentTable trans = window_table(T);
  const MomentTable refl = window_table(R);
  auto incoming = [&](long x) { return plane_window(-k2, -k1, x); };

  auto phi_R = [&](long x) {
    cplx v = sea_kernel(k1, x);
    if (left_higher) return v + trans.at(x) / two_pi;
    return v + refl.at(x) / two_pi + incoming(x);
  };
  auto phi_L = [&](long x) {
    cplx v = sea_kernel(k1, x);
    if (left_higher) return v + refl.at(x) / two_pi + incoming(x);
    return v + trans.at(x) / two_pi;
  };

  fill_block(c.matrix, 0, 0, nL, nL, true, [&](std::size_t i, std::size_t j) {
    return phi_L(static_cast<long>(i) - static_cast<long>(j));
  });
  fill_block(c.matrix, nL, nL, nR, nR, true, [&](std::size_t i, std::size_t j) {
    return phi_R(static_cast<long>(i) - static_cast<long>(j));
  });

  if (nL > 0 && nR > 0 && k2 > k1) {
    const double dd = static_cast<double>(geom.d_L - geom.d_R);
    auto cross = [&](double k) {
      const SMatrix s = s_matrix(model, k);
      const cplx amp = left_higher ? std::conj(s.t_L) * s.r_L : s.t_R * std::conj(s.r_R);
      return amp * std::polar(1.0, k * dd);
    };
    const MomentTable x_tab = window_table(cross);
    // <c_{R,j}^dagger c_{L,m}> = x_tab(j - m); stored at (L_m, R_j) as its conjugate.
    fill_block(c.matrix, 0, nL, nL, nR, false, [&](std::size_t m, std::size_t j) {
      return std::conj(x_tab.at(static_cast<long>(j) - static_cast<long>(m)) / two_pi);
    });
  }
  c.matrix.set_hermitian_hint(true);
  return c;
}

/// Debug dump: dimension as uint64, then row-major (re, im) float64 pairs,
/// little-endian.
inline void write_matrix_binary(const ComplexMatrix& m, const std::string& path) {
  static_assert(std::endian::native == std::endian::little, "dump format assumes little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const std::uint64_t dim = m.dim();
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  for (const auto& z : m.data()) {
    const double re = z.real(), im = z.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof re);
    out.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace nessent
