#pragma once

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "nessent/correlation.hpp"
#include "nessent/entanglement.hpp"
#include "nessent/errors.hpp"
#include "nessent/numerics/quadrature.hpp"
#include "nessent/scattering.hpp"

namespace nessent {

struct AsymptoticPrediction {
  double linear_term = 0;
  double log_term = 0;
  double total_minus_constant = 0;
  std::map<std::string, double> kernel_values;

  void finish() { total_minus_constant = linear_term + log_term; }
};

namespace detail {

inline constexpr double pi2 = std::numbers::pi * std::numbers::pi;

inline double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

inline QuadratureSpec kernel_spec() {
  QuadratureSpec s;
  s.abs_tol = 1e-14;
  s.rel_tol = 1e-13;
  s.max_panels = 200000;
  return s;
}

template <class F>
double kernel_integral(F&& f) {
  return integrate(std::forward<F>(f), 0.0, 1.0, kernel_spec(), Grading::left).real();
}

inline void require_probability(double p, const char* who) {
  if (!(p >= 0 && p <= 1)) throw DomainError(std::string(who) + ": argument must lie in [0, 1]");
}
inline void require_order(double n, const char* who) {
  if (!(n > 0)) throw DomainError(std::string(who) + ": order must be > 0");
}

// Memo of kernel values keyed by (kernel id, n, argument).
class KernelCache {
 public:
  template <class Compute>
  double get(int id, double n, double p, Compute&& compute) {
    const auto key = std::make_tuple(id, n, p);
    {
      std::shared_lock lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) return it->second;
    }
    const double v = compute();
    std::unique_lock lock(mu_);
    map_.emplace(key, v);
    return v;
  }

 private:
  std::shared_mutex mu_;
  std::map<std::tuple<int, double, double>, double> map_;
};

inline KernelCache& kernel_cache() {
  static KernelCache cache;
  return cache;
}

inline double Q_uncached(double n, double p) {
  const double r = 1 - p;
  const double norm = std::pow(p, n) + std::pow(r, n);
  const double v = kernel_integral([&](double x) {
    const double a = std::log(std::pow(1 + p * x, n) + std::pow(r * x, n));
    const double b = std::log((std::pow(x + p, n) + std::pow(r, n)) / norm);
    return (a + b) / (2 * pi2 * x);
  });
  return -n / 12 + v;
}

inline double Q_tilde_uncached(double n, double t) {
  const double r = 1 - t;
  const double v1 = kernel_integral([&](double x) {
    const double a = std::log(std::pow(1 + t * x, n) + std::pow(r * x, n));
    const double b = std::log(std::pow(1 + r * x, n) + std::pow(t * x, n));
    return (a + b) / (2 * pi2 * x);
  });
  const double v2 = kernel_integral([&](double x) {
    const double den = std::pow(t + r * x, n) + std::pow(r + t * x, n);
    const double a = std::log((std::pow(x + t, n) + std::pow(r, n)) / den);
    const double b = std::log((std::pow(x + r, n) + std::pow(t, n)) / den);
    return (a + b) / (2 * pi2 * x);
  });
  return -n / 12 + v1 + v2;
}

inline double q_uncached(double t) {
  const double r = 1 - t;
  const double v1 = kernel_integral([&](double x) {
    return ((1 + r * x) * std::log1p(r * x) + (1 + t * x) * std::log1p(t * x)) /
           ((1 + x) * 2 * pi2 * x);
  });
  const double v2 = kernel_integral([&](double x) {
    const double mixed = (xlogx(r + x) + xlogx(t + x)) / (1 + x);
    return (xlogx(t) + xlogx(r) - mixed) / (2 * pi2 * x);
  });
  return 1.0 / 24 - v1 + v2;
}

inline double q_tilde_uncached(double t) {
  const double r = 1 - t;
  const double v = kernel_integral([&](double x) {
    const double mixed = (xlogx(r + t * x) + xlogx(t + r * x)) / (1 + x);
    return (mixed - xlogx(t) - xlogx(r)) / (pi2 * x);
  });
  return q_uncached(t) + 1.0 / 12 + v;
}

// lim_{n->1} Q_n(p) / (1 - n).
inline double q_single_uncached(double p) {
  const double r = 1 - p;
  const double v = kernel_integral([&](double x) {
    // x ln(x) terms are kept in the form r ln(r x) to stay finite at x -> 0.
    const double first = ((1 + p * x) * std::log1p(p * x) + (r > 0 ? r * x * std::log(r * x) : 0.0)) / (1 + x);
    const double second = (xlogx(x + p) + xlogx(r)) / (1 + x);
    return (first + second - xlogx(p) - xlogx(r)) / (2 * pi2 * x);
  });
  return 1.0 / 12 - v;
}

}  // namespace detail

/// Q_n(p), the logarithmic kernel for a single Fermi-edge pair.
inline double Q_n(double n, double p) {
  detail::require_order(n, "Q_n");
  detail::require_probability(p, "Q_n");
  if (n == 1) return 0;
  return detail::kernel_cache().get(0, n, p, [&] { return detail::Q_uncached(n, p); });
}

/// Q~_n(T, 1 - T), the kernel of the cross-interval logarithm.
inline double Q_tilde_n(double n, double t) {
  detail::require_order(n, "Q_tilde_n");
  detail::require_probability(t, "Q_tilde_n");
  if (n == 1) return 0;
  return detail::kernel_cache().get(1, n, t, [&] { return detail::Q_tilde_uncached(n, t); });
}

inline double q(double t) {
  detail::require_probability(t, "q");
  return detail::kernel_cache().get(2, 1, t, [&] { return detail::q_uncached(t); });
}

inline double q_tilde(double t) {
  detail::require_probability(t, "q_tilde");
  return detail::kernel_cache().get(3, 1, t, [&] { return detail::q_tilde_uncached(t); });
}

/// lim_{n->1} Q_n(p) / (1 - n); the von Neumann counterpart of Q_n(p)/(1-n).
inline double q_single(double p) {
  detail::require_probability(p, "q_single");
  return detail::kernel_cache().get(4, 1, p, [&] { return detail::q_single_uncached(p); });
}

/// Coefficient of ln l in the entropy of two symmetric disjoint intervals.
inline double disjoint_symmetric_log(double n) {
  detail::require_order(n, "disjoint_symmetric_log");
  return (1 + n) / (3 * n);
}

namespace detail {

// Integral over the voltage window of a function of T(k).
template <class F>
double window_integral(const ScatteringModel& model, const BiasState& bias, F&& f) {
  const double k1 = bias.k_minus(), k2 = bias.k_plus();
  if (k2 <= k1) return 0;
  QuadratureSpec s;
  s.abs_tol = 1e-14;
  s.rel_tol = 1e-13;
  return integrate([&](double k) { return f(transmission(model, k)); }, k1, k2, s).real();
}

inline double renyi_density(double t, double n) { return mode_entropy(t, n); }

}  // namespace detail

/// Volume-law coefficient of the mutual information per mirror pair.
inline double volume_coefficient_mi(const ScatteringModel& model, const BiasState& bias, double n) {
  detail::require_order(n, "volume_coefficient_mi");
  return detail::window_integral(model, bias, [n](double t) { return detail::renyi_density(t, n); }) /
         std::numbers::pi;
}

/// Entropy density per site of any block (multiplies ell_L, ell_R, or
/// delta_ell_L + delta_ell_R for the union).
inline double volume_coefficient_entropy(const ScatteringModel& model, const BiasState& bias,
                                         double n) {
  detail::require_order(n, "volume_coefficient_entropy");
  return detail::window_integral(model, bias, [n](double t) { return detail::renyi_density(t, n); }) /
         (2 * std::numbers::pi);
}

/// Linear entropy term of one subsystem.
inline double volume_term_entropy(const ScatteringModel& model, const BiasState& bias,
                                  const SubsystemGeometry& geom, double n, Subsystem which) {
  geom.validate();
  const auto ov = mirror_overlap(geom);
  const double c = volume_coefficient_entropy(model, bias, n);
  switch (which) {
    case Subsystem::A_L: return c * static_cast<double>(geom.ell_L);
    case Subsystem::A_R: return c * static_cast<double>(geom.ell_R);
    case Subsystem::A: return c * static_cast<double>(ov.delta_ell_L + ov.delta_ell_R);
  }
  return 0;
}

namespace detail {

// ln|num / den| where vanishing denominator factors are dropped.
inline double degenerate_log(double num, std::initializer_list<long> den) {
  double v = std::log(std::abs(num));
  for (long f : den)
    if (f != 0) v -= std::log(std::abs(static_cast<double>(f)));
  return v;
}

struct LogArguments {
  double cross;   // multiplies Q~ (or q~)
  double mirror;  // multiplies the Q(T) + Q(R) combination (or q)
};

inline LogArguments log_arguments(const SubsystemGeometry& g) {
  const auto m = g.sorted_lengths();
  const double num = static_cast<double>(m[2] - m[0]) * static_cast<double>(m[3] - m[1]);
  return {degenerate_log(num, {g.ell_R + g.d_R - g.d_L, g.ell_L + g.d_L - g.d_R}),
          degenerate_log(num, {g.ell_L + g.d_L - g.ell_R - g.d_R, g.d_L - g.d_R})};
}

}  // namespace detail

/// Far-limit mutual information up to a constant; n == 1 is von Neumann.
inline AsymptoticPrediction mi_prediction(const ScatteringModel& model, const BiasState& bias,
                                          const SubsystemGeometry& geom, double n) {
  geom.validate();
  detail::require_order(n, "mi_prediction");
  AsymptoticPrediction p;
  const auto ov = mirror_overlap(geom);
  p.linear_term = static_cast<double>(ov.ell_mirror) * volume_coefficient_mi(model, bias, n);
  // Without a voltage window the far-limit cross block vanishes and so does the MI.
  if (bias.k_FL == bias.k_FR) {
    p.finish();
    return p;
  }

  const auto args = detail::log_arguments(geom);
  double sum = 0;
  const std::array<std::pair<const char*, double>, 2> edges{
      {{"k_FL", bias.k_FL}, {"k_FR", bias.k_FR}}};
  for (const auto& [name, kf] : edges) {
    const double t = transmission(model, kf);
    const std::string tag = std::string("@") + name;
    if (n == 1) {
      const double qt = q_tilde(t), qq = q(t);
      p.kernel_values["q_tilde" + tag] = qt;
      p.kernel_values["q" + tag] = qq;
      sum += qt * args.cross + qq * args.mirror;
    } else {
      const double qt = Q_tilde_n(n, t);
      const double qs = Q_n(n, t) + Q_n(n, 1 - t);
      p.kernel_values["Q_tilde" + tag] = qt;
      p.kernel_values["Q(T)+Q(R)" + tag] = qs;
      sum += qt * args.cross + (qs - (1 / n - n) / 12) * args.mirror;
    }
  }
  p.log_term = n == 1 ? 0.5 * sum : sum / (2 * (1 - n));
  p.finish();
  return p;
}

enum class Side { left, right };

/// Entropy of a single interval of length ell on one side, far from the
/// scatterer; n == 1 is von Neumann.
inline AsymptoticPrediction contiguous_entropy_prediction(const ScatteringModel& model,
                                                          const BiasState& bias, long ell,
                                                          Side side, double n) {
  if (ell < 1) throw GeometryError("contiguous_entropy_prediction: ell must be >= 1");
  detail::require_order(n, "contiguous_entropy_prediction");
  AsymptoticPrediction p;
  const double L = static_cast<double>(ell), lnL = std::log(L);
  p.linear_term = L * volume_coefficient_entropy(model, bias, n);
  // A_L pairs T at k_FL with R at k_FR; A_R the reverse.
  const double kt = side == Side::left ? bias.k_FL : bias.k_FR;
  const double kr = side == Side::left ? bias.k_FR : bias.k_FL;
  const double t = transmission(model, kt), r = reflection(model, kr);
  if (n == 1) {
    const double a = q_single(t), b = q_single(r);
    p.kernel_values["q1(T)"] = a;
    p.kernel_values["q1(R)"] = b;
    p.log_term = lnL / 6 + lnL * (a + b);
  } else {
    const double a = Q_n(n, t), b = Q_n(n, r);
    p.kernel_values["Q(T)"] = a;
    p.kernel_values["Q(R)"] = b;
    p.log_term = (1 + n) / (12 * n) * lnL + lnL / (1 - n) * (a + b);
  }
  p.finish();
  return p;
}

/// Coherent information I(A_L > A_R) = MI - S_AL (von Neumann).
inline AsymptoticPrediction ci_prediction(const ScatteringModel& model, const BiasState& bias,
                                          const SubsystemGeometry& geom) {
  geom.validate();
  const auto ov = mirror_overlap(geom);
  const auto mi = mi_prediction(model, bias, geom, 1);
  const auto sl = contiguous_entropy_prediction(model, bias, geom.ell_L, Side::left, 1);
  AsymptoticPrediction p;
  p.linear_term = static_cast<double>(ov.ell_mirror - ov.delta_ell_L) *
                  volume_coefficient_entropy(model, bias, 1);
  p.log_term = mi.log_term - sl.log_term;
  p.kernel_values = mi.kernel_values;
  p.kernel_values.insert(sl.kernel_values.begin(), sl.kernel_values.end());
  p.finish();
  return p;
}

/// Logarithmic negativity. The linear term holds for any geometry; the log
/// term is known only for l_L = l_R, d_L = d_R and is refused otherwise.
inline AsymptoticPrediction negativity_prediction(const ScatteringModel& model,
                                                  const BiasState& bias,
                                                  const SubsystemGeometry& geom,
                                                  bool with_log = true) {
  geom.validate();
  const auto ov = mirror_overlap(geom);
  AsymptoticPrediction p;
  p.linear_term = static_cast<double>(ov.ell_mirror) *
                  detail::window_integral(model, bias,
                                          [](double t) { return std::log(std::sqrt(t) + std::sqrt(1 - t)); }) /
                  std::numbers::pi;
  if (with_log && (geom.ell_L != geom.ell_R || geom.d_L != geom.d_R))
    throw GeometryError("negativity_prediction: log term needs l_L = l_R and d_L = d_R");
  if (with_log && bias.k_FL != bias.k_FR) {
    const double lnL = std::log(static_cast<double>(geom.ell_L));
    double sum = 0;
    for (double kf : {bias.k_FL, bias.k_FR}) {
      const double t = transmission(model, kf);
      sum += Q_n(0.5, t) + Q_n(0.5, 1 - t);
    }
    p.kernel_values["sum Q_1/2"] = sum;
    p.log_term = -0.25 * lnL + lnL * sum;
  }
  p.finish();
  return p;
}

}  // namespace nessent
