#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nessent/correlation.hpp"
#include "nessent/errors.hpp"
#include "nessent/numerics/eigen.hpp"
#include "nessent/numerics/matrix.hpp"

namespace nessent {

/// Slack allowed outside [0, 1] before a spectrum is rejected.
inline constexpr double spectrum_slack = 1e-8;
/// Largest imaginary part tolerated in the negativity and in the C_Xi spectrum.
inline constexpr double imaginary_tolerance = 1e-7;

struct ClampedSpectrum {
  std::vector<double> values;
  int clamped = 0;
};

inline ClampedSpectrum clamp_spectrum(std::vector<double> ev) {
  ClampedSpectrum out;
  for (double& v : ev) {
    if (v < -spectrum_slack || v > 1 + spectrum_slack)
      throw SpectrumError("correlation eigenvalue " + std::to_string(v) + " outside [0, 1]");
    if (v < 0 || v > 1) {
      v = std::clamp(v, 0.0, 1.0);
      ++out.clamped;
    }
  }
  out.values = std::move(ev);
  return out;
}

inline ClampedSpectrum correlation_spectrum(const ComplexMatrix& c) {
  return clamp_spectrum(eig_hermitian(c));
}

/// Entropy of one mode with occupation nu; n == 1 is von Neumann.
inline double mode_entropy(double nu, double n) {
  if (nu <= 0 || nu >= 1) return 0;
  const double mu = 1 - nu;
  if (n == 1) return -(nu * std::log(nu) + mu * std::log1p(-nu));
  // nu^n + mu^n = 1 + nu (nu^(n-1) - 1) + mu (mu^(n-1) - 1), kept accurate near n = 1.
  const double m = n - 1;
  return std::log1p(nu * std::expm1(m * std::log(nu)) + mu * std::expm1(m * std::log1p(-nu))) / (1 - n);
}

inline double entropy_from_spectrum(const std::vector<double>& nu, double n) {
  double s = 0;
  for (double v : nu) s += mode_entropy(v, n);
  return s;
}

inline double renyi_entropy(const ComplexMatrix& c, double n) {
  if (!(n > 0) || n == 1) throw DomainError("renyi_entropy: order must be > 0 and != 1");
  return entropy_from_spectrum(correlation_spectrum(c).values, n);
}

inline double von_neumann_entropy(const ComplexMatrix& c) {
  return entropy_from_spectrum(correlation_spectrum(c).values, 1);
}

/// Renyi entropy for n != 1, von Neumann entropy for n == 1.
inline double entropy(const ComplexMatrix& c, double n) {
  if (!(n > 0)) throw DomainError("entropy: order must be > 0");
  return entropy_from_spectrum(correlation_spectrum(c).values, n);
}

inline double renyi_entropy(const CorrelationMatrix& c, double n) { return renyi_entropy(c.matrix, n); }
inline double von_neumann_entropy(const CorrelationMatrix& c) { return von_neumann_entropy(c.matrix); }

/// Tr[C^p] by repeated multiplication.
inline double correlation_moments(const ComplexMatrix& c, int p) {
  if (p < 1) throw DomainError("correlation_moments: p must be >= 1");
  ComplexMatrix acc = c;
  for (int i = 1; i < p; ++i) acc = mat_mul(acc, c);
  return acc.trace().real();
}

struct NegativityResult {
  double value = 0;
  double imag_residue = 0;    // |Im| of the log-determinant sum before discarding
  double max_imag_eigen = 0;  // max |Im xi| over the general-solver C_Xi spectrum
  double spectrum_gap = 0;    // max distance between the two C_Xi spectra, if both ran
};

/// How the C_Xi spectrum is obtained.
///
/// C_Xi = (I - P^{-1} S) / 2 with P = I + G+ G+^dagger positive definite and
/// S = G+ + G+^dagger Hermitian, so it is similar to (I - L^{-1} S L^{-dagger}) / 2
/// with P = L L^dagger and its spectrum is real. `hermitian_similarity` uses
/// that form; `general` diagonalizes C_Xi itself with the non-Hermitian solver.
enum class XiSpectrum { hermitian_similarity, general };

namespace detail {

inline void build_gammas(const CorrelationMatrix& c, ComplexMatrix& gp, ComplexMatrix& gm) {
  const std::size_t nL = c.size_L(), nR = c.size_R(), n = nL + nR;
  if (nL == 0 || nR == 0) throw DomainError("fermionic_negativity: both blocks must be non-empty");
  const ComplexMatrix& C = c.matrix;
  gp = ComplexMatrix(n);
  gm = ComplexMatrix(n);
  const cplx two_i(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool li = i < nL, lj = j < nL;
      const double id = i == j ? 1.0 : 0.0;
      if (li && lj) {
        gp(i, j) = gm(i, j) = 2.0 * C(i, j) - id;
      } else if (!li && !lj) {
        gp(i, j) = gm(i, j) = id - 2.0 * C(i, j);
      } else {
        gp(i, j) = -two_i * C(i, j);
        gm(i, j) = two_i * C(i, j);
      }
    }
  }
}

inline std::vector<double> xi_spectrum_hermitian(const CorrelationMatrix& c) {
  ComplexMatrix gp, gm;
  build_gammas(c, gp, gm);
  const std::size_t n = gp.dim();
  ComplexMatrix p = ComplexMatrix::identity(n) + mat_mul(gp, gm);
  ComplexMatrix s = gp + gm;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const cplx a = 0.5 * (p(i, j) + std::conj(p(j, i)));
      p(i, j) = a;
      p(j, i) = std::conj(a);
      const cplx b = 0.5 * (s(i, j) + std::conj(s(j, i)));
      s(i, j) = b;
      s(j, i) = std::conj(b);
    }
  ComplexMatrix li;
  try {
    li = lower_triangular_inverse(cholesky_lower(p));
  } catch (const Singular&) {
    throw SingularResolvent("fermionic_negativity: I + G+ G- is numerically singular");
  }
  ComplexMatrix m = mat_mul(mat_mul(li, s), li.adjoint());
  m.set_hermitian_hint(true);
  auto mu = eig_hermitian(m);
  std::vector<double> xi(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) xi[i] = 0.5 * (1 - mu[mu.size() - 1 - i]);
  return xi;
}

}  // namespace detail

/// C_Xi = (I - (I + G+ G-)^{-1} (G+ + G-)) / 2 for the partial time-reversal
/// of the A_L block.
inline ComplexMatrix transformed_correlation(const CorrelationMatrix& c) {
  ComplexMatrix gp, gm;
  detail::build_gammas(c, gp, gm);
  const std::size_t n = gp.dim();
  ComplexMatrix p_inv;
  try {
    p_inv = mat_inverse(ComplexMatrix::identity(n) + mat_mul(gp, gm));
  } catch (const Singular&) {
    throw SingularResolvent("fermionic_negativity: I + G+ G- is numerically singular");
  }
  ComplexMatrix cx = mat_mul(p_inv, gp + gm);
  cx *= -0.5;
  for (std::size_t i = 0; i < n; ++i) cx(i, i) += 0.5;
  return cx;
}

/// Renyi negativity E_n (n = 1 gives the logarithmic negativity) with
/// diagnostics on the discarded imaginary parts. With `cross_check` the
/// general solver also runs on C_Xi and both spectra are compared.
inline NegativityResult fermionic_negativity_detail(const CorrelationMatrix& c, double n = 1,
                                                    XiSpectrum method = XiSpectrum::hermitian_similarity,
                                                    bool cross_check = false) {
  if (!(n > 0)) throw DomainError("fermionic_negativity: order must be > 0");
  const auto nu = correlation_spectrum(c.matrix).values;
  const double half = n / 2;
  NegativityResult r;
  cplx sum{};
  for (double v : nu) sum += half * std::log(v * v + (1 - v) * (1 - v));

  std::vector<cplx> general;
  if (method == XiSpectrum::general || cross_check) {
    general = eig_general(transformed_correlation(c));
    for (const cplx& z : general) r.max_imag_eigen = std::max(r.max_imag_eigen, std::abs(z.imag()));
  }

  if (method == XiSpectrum::hermitian_similarity) {
    const auto xi = clamp_spectrum(detail::xi_spectrum_hermitian(c)).values;
    for (double z : xi) sum += std::log(std::pow(z, half) + std::pow(1 - z, half));
    if (cross_check) {
      std::vector<double> re;
      for (const cplx& z : general) re.push_back(z.real());
      std::sort(re.begin(), re.end());
      auto sorted = xi;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < re.size(); ++i)
        r.spectrum_gap = std::max(r.spectrum_gap, std::abs(re[i] - sorted[i]));
    }
  } else {
    for (cplx z : general) {
      if (z.real() < 0 && z.real() > -spectrum_slack) z = cplx(0, z.imag());
      if (z.real() > 1 && z.real() < 1 + spectrum_slack) z = cplx(1, z.imag());
      const cplx a = z == cplx{} ? cplx{} : std::pow(z, half);
      const cplx b = z == cplx(1) ? cplx{} : std::pow(1.0 - z, half);
      sum += std::log(a + b);
    }
  }
  r.imag_residue = std::abs(sum.imag());
  if (r.imag_residue >= imaginary_tolerance)
    throw ImaginaryResidue("fermionic_negativity: imaginary residue " +
                           std::to_string(r.imag_residue));
  r.value = sum.real();
  return r;
}

inline double fermionic_negativity(const CorrelationMatrix& c, double n = 1) {
  return fermionic_negativity_detail(c, n).value;
}

struct EntanglementReport {
  double renyi_order = 1;  // 1 means von Neumann
  double S_AL = 0;
  double S_AR = 0;
  double S_A = 0;
  double mutual_info = 0;
  double coherent_info = 0;
  std::optional<double> negativity;
  double max_imag_discarded = 0;
  double xi_spectrum_gap = 0;
  int clamp_count = 0;

  bool is_von_neumann() const noexcept { return renyi_order == 1; }
};

/// Entropies of both blocks and of their union, with mutual and coherent
/// information I(A_L > A_R) = S_AR - S_A.
inline EntanglementReport measures(const CorrelationMatrix& c, double n, bool with_negativity = false,
                                   bool check_xi = false) {
  if (c.size_L() == 0 || c.size_R() == 0)
    throw DomainError("measures: both A_L and A_R blocks are required");
  if (!(n > 0)) throw DomainError("measures: order must be > 0");
  EntanglementReport r;
  r.renyi_order = n;
  const auto sl = correlation_spectrum(c.block_L());
  const auto sr = correlation_spectrum(c.block_R());
  const auto sa = correlation_spectrum(c.matrix);
  r.clamp_count = sl.clamped + sr.clamped + sa.clamped;
  r.S_AL = entropy_from_spectrum(sl.values, n);
  r.S_AR = entropy_from_spectrum(sr.values, n);
  r.S_A = entropy_from_spectrum(sa.values, n);
  r.mutual_info = r.S_AL + r.S_AR - r.S_A;
  r.coherent_info = r.S_AR - r.S_A;
  if (with_negativity) {
    const auto neg = fermionic_negativity_detail(c, 1, XiSpectrum::hermitian_similarity, check_xi);
    r.negativity = neg.value;
    r.max_imag_discarded = std::max(neg.imag_residue, neg.max_imag_eigen);
    r.xi_spectrum_gap = neg.spectrum_gap;
  }
  return r;
}

}  // namespace nessent
