#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nessent/errors.hpp"

namespace nessent {

struct SlopeCheck {
  double fitted = 0;
  double predicted = 0;
  double relative_error = 0;
};

struct FitResult {
  double offset = 0;
  double residual_max = 0;
  double residual_rms = 0;
  std::optional<SlopeCheck> slope_check;
};

/// Linear driver for the optional slope check: numeric is regressed on
/// x (plus ln x and a constant when with_log is set).
struct SlopeDriver {
  std::vector<double> x;
  double predicted = 0;
  bool with_log = true;
};

/// Least-squares coefficients of y on the given column functions of x.
template <class... Cols>
Eigen::VectorXd least_squares(std::span<const double> x, std::span<const double> y, Cols... cols) {
  if (x.size() != y.size()) throw LengthMismatch("least_squares: x and y differ in length");
  constexpr std::size_t k = sizeof...(Cols);
  if (x.size() < k) throw LengthMismatch("least_squares: too few points");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(k));
  Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double row[] = {cols(x[i])...};
    for (std::size_t c = 0; c < k; ++c)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    b(static_cast<Eigen::Index>(i)) = y[i];
  }
  return a.colPivHouseholderQr().solve(b);
}

/// Slope of y against x from y = a x + b (ln x) + c, or y = a x + c.
inline double fitted_slope(std::span<const double> x, std::span<const double> y, bool with_log) {
  auto lin = [](double v) { return v; };
  auto one = [](double) { return 1.0; };
  if (with_log) {
    for (double v : x)
      if (!(v > 0)) throw DomainError("fitted_slope: log column needs x > 0");
    return least_squares(x, y, lin, [](double v) { return std::log(v); }, one)(0);
  }
  return least_squares(x, y, lin, one)(0);
}

/// Exponent of a power law y ~ x^p from a log-log regression.
inline double power_law_exponent(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw DomainError("power_law_exponent: values must be > 0");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly, [](double v) { return v; }, [](double) { return 1.0; })(0);
}

/// One fitted constant: offset = mean(numeric - analytic). The inputs are
/// not modified.
inline FitResult fit_constant(std::span<const double> numeric, std::span<const double> analytic,
                              const SlopeDriver* driver = nullptr) {
  if (numeric.size() != analytic.size())
    throw LengthMismatch("fit_constant: numeric and analytic series differ in length");
  if (numeric.size() < 3) throw LengthMismatch("fit_constant: need at least 3 points");
  FitResult f;
  const double n = static_cast<double>(numeric.size());
  for (std::size_t i = 0; i < numeric.size(); ++i) f.offset += numeric[i] - analytic[i];
  f.offset /= n;
  double ss = 0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double r = numeric[i] - analytic[i] - f.offset;
    f.residual_max = std::max(f.residual_max, std::abs(r));
    ss += r * r;
  }
  f.residual_rms = std::min(std::sqrt(ss / n), f.residual_max);
  if (driver) {
    if (driver->x.size() != numeric.size())
      throw LengthMismatch("fit_constant: slope driver length differs");
    SlopeCheck s;
    s.fitted = fitted_slope(driver->x, numeric, driver->with_log);
    s.predicted = driver->predicted;
    s.relative_error = s.predicted != 0 ? std::abs(s.fitted / s.predicted - 1) : std::abs(s.fitted);
    f.slope_check = s;
  }
  return f;
}

/// Number of uniformly spaced samples (spacing `step`) that spans whole
/// periods of both 2 k_FL and 2 k_FR, so a moving average over it cancels
/// the Friedel harmonics. Falls back to one period of k_FL + k_FR, rounded,
/// when no window up to `max_window` works.
inline std::size_t friedel_window(double k_FL, double k_FR, double step = 1,
                                  std::size_t max_window = 64) {
  auto whole = [&](double freq, std::size_t w) {
    const double cycles = freq * step * static_cast<double>(w) / (2 * std::numbers::pi);
    return std::abs(cycles - std::round(cycles)) < 1e-9;
  };
  for (std::size_t w = 2; w <= max_window; ++w)
    if (whole(2 * k_FL, w) && whole(2 * k_FR, w)) return w;
  const double period = 2 * std::numbers::pi / ((k_FL + k_FR) * step);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(period)));
}

struct OscillationPoint {
  double center = 0;
  double average = 0;
  double amplitude = 0;
};

/// Moving average over `window` consecutive samples and the largest
/// |y - average| inside it. One point per full window position.
inline std::vector<OscillationPoint> oscillation_profile(std::span<const double> x,
                                                         std::span<const double> y,
                                                         std::size_t window) {
  if (x.size() != y.size()) throw LengthMismatch("oscillation_profile: x and y differ in length");
  if (window < 1) throw DomainError("oscillation_profile: window must be >= 1");
  std::vector<OscillationPoint> out;
  if (y.size() < window) return out;
  for (std::size_t i = 0; i + window <= y.size(); ++i) {
    OscillationPoint p;
    for (std::size_t j = i; j < i + window; ++j) p.average += y[j];
    p.average /= static_cast<double>(window);
    for (std::size_t j = i; j < i + window; ++j)
      p.amplitude = std::max(p.amplitude, std::abs(y[j] - p.average));
    p.center = 0.5 * (x[i] + x[i + window - 1]);
    out.push_back(p);
  }
  return out;
}

}  // namespace nessent
