#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "nessent/errors.hpp"

namespace nessent {

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_panels = 20000;
  int nodes_per_panel = 16;

  void validate() const {
    if (!(abs_tol > 0)) throw DomainError("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol >= 0)) throw DomainError("QuadratureSpec: rel_tol must be >= 0");
    if (nodes_per_panel < 4) throw DomainError("QuadratureSpec: nodes_per_panel must be >= 4");
    if (max_panels < 1) throw DomainError("QuadratureSpec: max_panels must be >= 1");
  }
};

/// Which endpoints carry an integrable singularity and get geometrically
/// graded starting panels.
enum class Grading { none, left, right, both };

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1, 1], ascending
  std::vector<double> w;
};

/// Gauss-Legendre rule of order n (Newton on P_n, cached per thread).
inline const GaussLegendre& gauss_legendre(int n) {
  thread_local std::map<int, GaussLegendre> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre rule;
  rule.x.resize(static_cast<std::size_t>(n));
  rule.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1);
    const double w = 2 / ((1 - z * z) * dp * dp);
    rule.x[static_cast<std::size_t>(i)] = -z;
    rule.x[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.w[static_cast<std::size_t>(i)] = w;
    rule.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace detail {

template <class F>
std::complex<double> gl_panel(F& f, double a, double b, const GaussLegendre& rule) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  std::complex<double> s{};
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    s += rule.w[i] * std::complex<double>(f(c + h * rule.x[i]));
  return h * s;
}

struct Panel {
  double a, b;
  std::complex<double> left, right;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

struct AdaptiveResult {
  std::complex<double> value;
  double error;
  std::vector<double> breakpoints;  // leaf panel edges, ascending
};

// Adaptive bisection from the given starting breakpoints. Each panel's error
// is |G(P) - G(P_left) - G(P_right)| and its value the children sum.
template <class F>
AdaptiveResult adaptive(F& f, std::span<const double> start, const QuadratureSpec& spec,
                        bool want_breakpoints, const char* who) {
  spec.validate();
  const auto& rule = gauss_legendre(spec.nodes_per_panel);

  std::priority_queue<Panel> open;
  std::vector<Panel> done;
  std::complex<double> total{};
  double err_total = 0;
  auto make = [&](double a, double b, std::complex<double> whole) {
    const double m = 0.5 * (a + b);
    Panel p{a, b, gl_panel(f, a, m, rule), gl_panel(f, m, b, rule), 0};
    p.err = std::abs(whole - p.left - p.right);
    // Panels narrower than double resolution cannot be refined further.
    if (!(m > a && m < b) || (b - a) <= 1e-15 * std::max(std::abs(a), std::abs(b)))
      p.err = 0;
    return p;
  };
  auto add = [&](Panel p) {
    total += p.left + p.right;
    err_total += p.err;
    if (p.err > 0)
      open.push(p);
    else
      done.push_back(p);
  };
  for (std::size_t i = 0; i + 1 < start.size(); ++i) {
    if (start[i + 1] <= start[i]) continue;
    add(make(start[i], start[i + 1], gl_panel(f, start[i], start[i + 1], rule)));
  }
  std::size_t panels = open.size() + done.size();

  while (!open.empty()) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (err_total <= target) break;
    if (panels >= static_cast<std::size_t>(spec.max_panels))
      throw NonConvergence(std::string(who) + ": panel budget exhausted (error " +
                           std::to_string(err_total) + ")");
    Panel p = open.top();
    open.pop();
    total -= p.left + p.right;
    err_total -= p.err;
    const double m = 0.5 * (p.a + p.b);
    add(make(p.a, m, p.left));
    add(make(m, p.b, p.right));
    ++panels;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  AdaptiveResult res{{}, 0, {}};
  std::vector<Panel> leaves = std::move(done);
  while (!open.empty()) {
    leaves.push_back(open.top());
    open.pop();
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : leaves) {
    res.value += p.left + p.right;
    res.error += p.err;
  }
  if (want_breakpoints) {
    res.breakpoints.reserve(leaves.size() + 1);
    for (const auto& p : leaves) res.breakpoints.push_back(p.a);
    if (!leaves.empty()) res.breakpoints.push_back(leaves.back().b);
  }
  return res;
}

inline std::vector<double> graded_breakpoints(double a, double b, Grading g) {
  std::vector<double> pts{a, b};
  const int levels = 30;
  const double len = b - a;
  for (int j = 1; j <= levels; ++j) {
    if (g == Grading::left || g == Grading::both) pts.push_back(a + std::ldexp(len, -j));
    if (g == Grading::right || g == Grading::both) pts.push_back(b - std::ldexp(len, -j));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

/// Adaptive Gauss-Legendre quadrature of a real-argument function on [a, b].
///
/// Integrable endpoint singularities are handled by passing a Grading, which
/// seeds geometric panels toward the named ends.
template <class F>
std::complex<double> integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                               Grading grading = Grading::none) {
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return {};
  const auto pts = detail::graded_breakpoints(a, b, grading);
  return detail::adaptive(f, pts, spec, false, "integrate").value;
}

/// Integral of f_smooth(k) * exp(i * rate * k) over [a, b].
///
/// Starts from one panel per oscillation period and refines adaptively, so
/// the node count grows at least linearly with |rate| (b - a).
template <class F>
std::complex<double> integrate_oscillatory(F&& f_smooth, double rate, double a, double b,
                                           const QuadratureSpec& spec = {}) {
  if (!(a <= b)) throw DomainError("integrate_oscillatory: requires a <= b");
  if (a == b) return {};
  const double periods = std::abs(rate) * (b - a) / (2 * std::numbers::pi);
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(periods)));
  std::vector<double> pts(n + 1);
  for (std::size_t i = 0; i <= n; ++i) pts[i] = a + (b - a) * static_cast<double>(i) / n;
  pts[n] = b;
  auto g = [&](double k) {
    return std::complex<double>(f_smooth(k)) * std::polar(1.0, rate * k);
  };
  return detail::adaptive(g, pts, spec, false, "integrate_oscillatory").value;
}

/// Batched Fourier moments: out[s] = integral over [a, b] of
/// g(k) exp(i k (x0 + s)) dk for s = 0 .. count-1.
///
/// g is resolved adaptively once; the resulting panels are then cut so no
/// panel spans more than one period of the fastest exponential, and every
/// moment reuses the same weighted nodes.
template <class G>
std::vector<std::complex<double>> fourier_moments(G&& g, double a, double b, long x0,
                                                  std::size_t count,
                                                  const QuadratureSpec& spec = {}) {
  if (!(a <= b)) throw DomainError("fourier_moments: requires a <= b");
  std::vector<std::complex<double>> out(count);
  if (a == b || count == 0) return out;

  const double seed[] = {a, 0.5 * (a + b), b};
  auto base = detail::adaptive(g, seed, spec, true, "fourier_moments");
  const double xmax = std::max(std::abs(static_cast<double>(x0)),
                               std::abs(static_cast<double>(x0) + static_cast<double>(count) - 1));
  const double max_width = xmax > 0 ? 2 * std::numbers::pi / xmax : (b - a);

  const auto& rule = gauss_legendre(spec.nodes_per_panel);
  const std::size_t np = rule.x.size();
  std::vector<double> nodes;
  std::vector<std::complex<double>> weighted;
  for (std::size_t p = 0; p + 1 < base.breakpoints.size(); ++p) {
    const double pa = base.breakpoints[p], pb = base.breakpoints[p + 1];
    const auto pieces =
        static_cast<std::size_t>(std::max(1.0, std::ceil((pb - pa) / max_width)));
    for (std::size_t q = 0; q < pieces; ++q) {
      const double sa = pa + (pb - pa) * static_cast<double>(q) / pieces;
      const double sb = q + 1 == pieces ? pb : pa + (pb - pa) * static_cast<double>(q + 1) / pieces;
      const double h = 0.5 * (sb - sa), c = 0.5 * (sa + sb);
      for (std::size_t i = 0; i < np; ++i) {
        const double k = c + h * rule.x[i];
        nodes.push_back(k);
        weighted.push_back(h * rule.w[i] * std::complex<double>(g(k)));
      }
    }
  }
  // Restart the phase recurrence every block of moments to bound drift.
  const std::size_t block = 64;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double k = nodes[i];
    const std::complex<double> step = std::polar(1.0, k);
    for (std::size_t s0 = 0; s0 < count; s0 += block) {
      std::complex<double> ph =
          weighted[i] * std::polar(1.0, k * (static_cast<double>(x0) + static_cast<double>(s0)));
      const std::size_t s1 = std::min(count, s0 + block);
      for (std::size_t s = s0; s < s1; ++s) {
        out[s] += ph;
        ph *= step;
      }
    }
  }
  return out;
}

}  // namespace nessent
