#pragma once

// First (unsubtracted) integral forms of the logarithmic kernels, evaluated
// with Boost's tanh-sinh rule. The library uses the subtracted forms.

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// (x^{n-1} - y^{n-1}) / (x^n + y^n) with y = 1 - x passed separately so it
// stays accurate next to x = 1.
inline double weight(double n, double x, double y) {
  return (std::pow(x, n - 1) - std::pow(y, n - 1)) / (std::pow(x, n) + std::pow(y, n));
}

// f(x, xc) receives the signed distance xc to the nearer endpoint.
template <class F>
double tanh_sinh(F&& f, double a, double b) {
  if (a == b) return 0;
  static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  return rule.integrate(f, a, b, 1e-14);
}

// Q_n(p) = n / (2 pi^2) * integral_p^1 w_n(x) ln[(1 - x) / (x - p)] dx
inline double Q_first(double n, double p) {
  auto f = [&](double x, double xc) {
    // xc < 0 near the left end (x - p = -xc), > 0 near the right end (1 - x = xc).
    const double from_p = xc < 0 ? -xc : x - p;
    const double to_one = xc > 0 ? xc : 1 - x;
    const double xx = xc < 0 ? p - xc : x;
    return weight(n, xx, to_one) * std::log(to_one / from_p);
  };
  return n / (2 * std::numbers::pi * std::numbers::pi) * tanh_sinh(f, p, 1.0);
}

// Q~_n(T) = Q_n(T) + Q_n(R) + n / (2 pi^2) * integral_R^T w_n(x) ln|(R - x) / (T - x)| dx
inline double Q_tilde_first(double n, double t) {
  const double r = 1 - t;
  const double lo = std::min(r, t), hi = std::max(r, t);
  auto f = [&](double x, double xc) {
    const double from_lo = xc < 0 ? -xc : x - lo;
    const double to_hi = xc > 0 ? xc : hi - x;
    // ln|R - x| - ln|T - x| with R, T at the ends.
    const double lr = std::log(r == lo ? from_lo : to_hi);
    const double lt = std::log(t == lo ? from_lo : to_hi);
    const double xx = xc < 0 ? lo - xc : x;
    const double yy = xc > 0 ? (1 - hi) + xc : 1 - x;
    return weight(n, xx, yy) * (lr - lt);
  };
  const double oriented = t >= r ? tanh_sinh(f, lo, hi) : -tanh_sinh(f, lo, hi);
  return Q_first(n, t) + Q_first(n, r) + n / (2 * std::numbers::pi * std::numbers::pi) * oriented;
}

}  // namespace oracle
