#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nessent/asymptotics.hpp"
#include "nessent/correlation.hpp"
#include "nessent/entanglement.hpp"
#include "nessent/experiment/config.hpp"
#include "nessent/experiment/csv.hpp"
#include "nessent/experiment/fit.hpp"
#include "nessent/experiment/pool.hpp"

namespace nessent {

/// Largest imaginary parts met while evaluating negativities.
struct XiDiagnostics {
  double max_imag = 0;  // max of the log-det residue and |Im xi| from the general solver
  double max_gap = 0;   // hermitian-similarity vs general spectra
  std::size_t evaluations = 0;

  void add(const EntanglementReport& r) {
    if (!r.negativity) return;
    max_imag = std::max(max_imag, r.max_imag_discarded);
    max_gap = std::max(max_gap, r.xi_spectrum_gap);
    ++evaluations;
  }
  void merge(const XiDiagnostics& o) {
    max_imag = std::max(max_imag, o.max_imag);
    max_gap = std::max(max_gap, o.max_gap);
    evaluations += o.evaluations;
  }
};

/// One numeric-vs-analytic series with its constant fit.
struct SeriesFit {
  double delta_k = 0;
  double order = 1;
  std::string measure;
  std::vector<double> x;
  std::vector<double> numeric;
  std::vector<double> analytic;
  FitResult fit;
  double offset_split = 0;  // |offset(first half) - offset(second half)|
};

struct SweepResult {
  CsvTable table;
  std::vector<SeriesFit> fits;
  XiDiagnostics xi;

  const SeriesFit& series(const std::string& measure, double order = 1, double delta_k = NAN) const {
    for (const auto& s : fits)
      if (s.measure == measure && s.order == order && (std::isnan(delta_k) || s.delta_k == delta_k))
        return s;
    throw DomainError("SweepResult: no series for " + measure);
  }
};

namespace detail {

struct MeasurePoint {
  std::string measure;
  double order;
  double numeric;
  double analytic;
  double imag;
};

// Measures requested at one far-limit geometry. CI and negativity are von
// Neumann / logarithmic only and appear for order 1.
inline std::vector<MeasurePoint> far_measures(const ScatteringModel& model, const BiasState& bias,
                                              const SubsystemGeometry& geom,
                                              const ExperimentConfig& cfg, bool symmetric,
                                              XiDiagnostics& xi) {
  const auto c = correlation_matrix_far(model, bias, geom, Subsystem::A, cfg.quadrature);
  std::vector<MeasurePoint> out;
  for (double n : cfg.orders) {
    const bool vn = n == 1;
    const auto r = measures(c, n, vn && cfg.wants("negativity"), cfg.xi_check);
    xi.add(r);
    if (cfg.wants("mi"))
      out.push_back({"mi", n, r.mutual_info, mi_prediction(model, bias, geom, n).total_minus_constant, 0});
    if (vn && cfg.wants("ci"))
      out.push_back({"ci", n, r.coherent_info, ci_prediction(model, bias, geom).total_minus_constant, 0});
    if (vn && cfg.wants("negativity"))
      out.push_back({"negativity", n, *r.negativity,
                     negativity_prediction(model, bias, geom, symmetric).total_minus_constant,
                     r.max_imag_discarded});
    if (symmetric && cfg.wants("entropy"))
      out.push_back({"entropy", n, r.S_A,
                     volume_term_entropy(model, bias, geom, n, Subsystem::A) +
                         disjoint_symmetric_log(n) * std::log(static_cast<double>(geom.ell_L)),
                     0});
  }
  return out;
}

inline double predicted_slope(const ScatteringModel& model, const BiasState& bias,
                              const std::string& measure, double n) {
  if (measure == "mi") return volume_coefficient_mi(model, bias, n);
  if (measure == "ci") return volume_coefficient_entropy(model, bias, 1);
  if (measure == "negativity")
    return negativity_prediction(model, bias, SubsystemGeometry::symmetric(1, 0), false).linear_term;
  return 0;
}

inline double offset_split(const std::vector<double>& num, const std::vector<double>& ana) {
  const std::size_t h = num.size() / 2;
  if (h < 1) return 0;
  auto mean = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t i = a; i < b; ++i) s += num[i] - ana[i];
    return s / static_cast<double>(b - a);
  };
  return std::abs(mean(0, h) - mean(h, num.size()));
}

inline std::vector<long> integer_range(long lo, long hi, long step) {
  std::vector<long> v;
  for (long x = lo; x <= hi; x += step) v.push_back(x);
  return v;
}

// Groups measure points by (measure, order) in first-seen order.
template <class Key>
std::vector<SeriesFit> collect(const std::vector<Key>& keys,
                               const std::vector<std::vector<MeasurePoint>>& points, double delta_k) {
  std::vector<SeriesFit> series;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (const auto& p : points[i]) {
      auto it = std::find_if(series.begin(), series.end(), [&](const SeriesFit& s) {
        return s.measure == p.measure && s.order == p.order;
      });
      if (it == series.end()) {
        series.push_back({});
        it = std::prev(series.end());
        it->delta_k = delta_k;
        it->order = p.order;
        it->measure = p.measure;
      }
      it->x.push_back(static_cast<double>(keys[i]));
      it->numeric.push_back(p.numeric);
      it->analytic.push_back(p.analytic);
    }
  }
  return series;
}

}  // namespace detail

inline std::vector<std::string> length_columns() {
  return {"row",      "delta_k",      "ell",          "order",        "measure",   "numeric",
          "analytic", "residual",     "imag_residue", "offset",       "residual_max",
          "residual_rms", "offset_split", "slope_fit", "slope_pred", "slope_rel_err"};
}

namespace detail {

// Symmetric far-limit series over ell for one bias; appends rows to `out`.
inline void length_series(const ExperimentConfig& cfg, const BiasState& bias, double dk, unsigned threads,
                          SweepResult& out) {
  const auto model = cfg.make_model();
  const auto ells = integer_range(cfg.ell_min, cfg.ell_max, cfg.ell_step);
  struct Job {
    std::vector<MeasurePoint> points;
    XiDiagnostics xi;
  };
  auto jobs = parallel_map(ells.size(), threads, [&](std::size_t i) {
    Job j;
    j.points = far_measures(model, bias, SubsystemGeometry::symmetric(ells[i], cfg.d_R), cfg, true, j.xi);
    return j;
  });
  std::vector<std::vector<MeasurePoint>> points;
  for (auto& j : jobs) {
    out.xi.merge(j.xi);
    points.push_back(std::move(j.points));
  }
  auto series = collect(ells, points, dk);
  for (auto& s : series) {
    if (s.x.size() >= 3) {
      SlopeDriver drv{s.x, predicted_slope(model, bias, s.measure, s.order), true};
      if (s.x.size() < 4) drv.with_log = false;
      s.fit = fit_constant(s.numeric, s.analytic, &drv);
      s.offset_split = offset_split(s.numeric, s.analytic);
    }
  }
  for (std::size_t i = 0; i < ells.size(); ++i)
    for (const auto& p : points[i]) {
      const auto& s = *std::find_if(series.begin(), series.end(), [&](const SeriesFit& f) {
        return f.measure == p.measure && f.order == p.order;
      });
      out.table.add({std::string("point"), dk, ells[i], p.order, p.measure, p.numeric, p.analytic,
                     p.numeric - p.analytic - s.fit.offset, p.imag, {}, {}, {}, {}, {}, {}, {}});
    }
  for (auto& s : series) {
    if (s.x.size() >= 3) {
      const auto& sc = *s.fit.slope_check;
      out.table.add({std::string("fit"), dk, {}, s.order, s.measure, {}, {}, {}, {}, s.fit.offset,
                     s.fit.residual_max, s.fit.residual_rms, s.offset_split, sc.fitted, sc.predicted,
                     sc.relative_error});
    }
    out.fits.push_back(std::move(s));
  }
}

}  // namespace detail

/// Symmetric far-limit scaling with the interval length.
inline SweepResult run_sweep_length(const ExperimentConfig& cfg, unsigned threads = default_threads()) {
  SweepResult out;
  out.table.header = length_columns();
  detail::length_series(cfg, cfg.bias(), cfg.k_FL - cfg.k_FR, threads, out);
  return out;
}

/// sweep-length for each bias k_FL = k_FR + delta_k, plus slope ratios for
/// every pair (dk, dk / 2) in the list.
inline SweepResult run_sweep_bias(const ExperimentConfig& cfg, unsigned threads = default_threads()) {
  SweepResult out;
  out.table.header = length_columns();
  for (double dk : cfg.delta_k) detail::length_series(cfg, BiasState(cfg.k_FR + dk, cfg.k_FR), dk, threads, out);
  for (const auto& a : out.fits)
    for (const auto& b : out.fits) {
      if (a.measure != b.measure || a.order != b.order || a.delta_k <= 0) continue;
      if (std::abs(b.delta_k - a.delta_k / 2) > 1e-12 || !a.fit.slope_check || !b.fit.slope_check) continue;
      const double ratio = a.fit.slope_check->fitted / b.fit.slope_check->fitted;
      out.table.add({std::string("ratio"), a.delta_k, {}, a.order, a.measure, {}, {}, {}, {}, {}, {}, {}, {},
                     ratio, 2.0, std::abs(ratio / 2 - 1)});
    }
  return out;
}

inline const char* overlap_regime(const SubsystemGeometry& g) {
  const auto ov = mirror_overlap(g);
  if (ov.ell_mirror == 0) return "disjoint";
  if (ov.ell_mirror == std::min(g.ell_L, g.ell_R)) return "contained";
  return "partial";
}

/// Far-limit MI (and CI) against d_L - d_R at fixed interval lengths with a
/// single global constant per series.
inline SweepResult run_sweep_position(const ExperimentConfig& cfg,
                                      unsigned threads = default_threads()) {
  const auto model = cfg.make_model();
  const auto bias = cfg.bias();
  const auto deltas = detail::integer_range(cfg.delta_min, cfg.delta_max, cfg.delta_step);
  auto geom = [&](long delta) { return SubsystemGeometry{0, cfg.d_R + delta, cfg.ell_L, cfg.d_R, cfg.ell_R}; };
  struct Job {
    std::vector<detail::MeasurePoint> points;
    XiDiagnostics xi;
  };
  auto jobs = parallel_map(deltas.size(), threads, [&](std::size_t i) {
    Job j;
    j.points = detail::far_measures(model, bias, geom(deltas[i]), cfg, false, j.xi);
    return j;
  });
  SweepResult out;
  out.table.header = {"row",    "delta",   "d_L",      "d_R",      "regime",   "ell_mirror",
                      "order",  "measure", "numeric",  "analytic", "residual", "offset",
                      "residual_max", "residual_rms"};
  std::vector<std::vector<detail::MeasurePoint>> points;
  for (auto& j : jobs) {
    out.xi.merge(j.xi);
    points.push_back(std::move(j.points));
  }
  auto series = detail::collect(deltas, points, bias.k_FL - bias.k_FR);
  for (auto& s : series)
    if (s.x.size() >= 3) s.fit = fit_constant(s.numeric, s.analytic);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto g = geom(deltas[i]);
    for (const auto& p : points[i]) {
      const auto& s = *std::find_if(series.begin(), series.end(), [&](const SeriesFit& f) {
        return f.measure == p.measure && f.order == p.order;
      });
      out.table.add({std::string("point"), deltas[i], g.d_L, g.d_R, std::string(overlap_regime(g)),
                     mirror_overlap(g).ell_mirror, p.order, p.measure, p.numeric, p.analytic,
                     p.numeric - p.analytic - s.fit.offset, {}, {}, {}});
    }
  }
  for (auto& s : series) {
    if (s.x.size() >= 3)
      out.table.add({std::string("fit"), {}, {}, {}, {}, {}, s.order, s.measure, {}, {}, {}, s.fit.offset,
                     s.fit.residual_max, s.fit.residual_rms});
    out.fits.push_back(std::move(s));
  }
  return out;
}

/// Oscillation amplitudes below this are round-off and get no power-law fit.
/// The negativity's square roots lift round-off to about 1e-8.
inline constexpr double flat_deviation = 1e-6;

struct DistanceFit {
  std::string measure;
  std::string quantity;  // "average" or "amplitude"
  double exponent = 0;
  double fit_lo = 0, fit_hi = 0;
};

struct DistanceSweepResult {
  CsvTable table;
  std::size_t window = 0;
  std::vector<double> d;
  std::map<std::string, std::vector<double>> deviation;  // value minus far-limit value
  std::map<std::string, double> far;
  std::vector<DistanceFit> fits;
  XiDiagnostics xi;

  double exponent(const std::string& measure, const std::string& quantity) const {
    for (const auto& f : fits)
      if (f.measure == measure && f.quantity == quantity) return f.exponent;
    throw DomainError("DistanceSweepResult: no fit for " + measure + " " + quantity);
  }
};

namespace detail {

inline std::map<std::string, double> pick(const EntanglementReport& r, const ExperimentConfig& cfg) {
  std::map<std::string, double> v;
  if (cfg.wants("mi")) v["mi"] = r.mutual_info;
  if (cfg.wants("ci")) v["ci"] = r.coherent_info;
  if (cfg.wants("negativity")) v["negativity"] = *r.negativity;
  if (cfg.wants("entropy")) v["entropy"] = r.S_A;
  return v;
}

}  // namespace detail

/// Finite-distance symmetric intervals against d (von Neumann), with the
/// Friedel-averaged deviation from the far limit and its oscillation
/// amplitude fitted to power laws over d / ell in [fit_ratio_min, fit_ratio_max].
inline DistanceSweepResult run_sweep_distance(const ExperimentConfig& cfg,
                                              unsigned threads = default_threads()) {
  const auto model = cfg.make_model();
  const auto bias = cfg.bias();
  const bool neg = cfg.wants("negativity");
  DistanceSweepResult out;

  const auto ref = measures(correlation_matrix_far(model, bias, SubsystemGeometry::symmetric(cfg.ell, cfg.d_min),
                                                   Subsystem::A, cfg.quadrature),
                            1, neg, cfg.xi_check);
  out.xi.add(ref);
  out.far = detail::pick(ref, cfg);

  const auto ds = detail::integer_range(cfg.d_min, cfg.d_max, cfg.d_step);
  struct Job {
    std::map<std::string, double> values;
    XiDiagnostics xi;
  };
  auto jobs = parallel_map(ds.size(), threads, [&](std::size_t i) {
    Job j;
    const auto c = correlation_matrix_finite(model, bias, SubsystemGeometry::symmetric(cfg.ell, ds[i]),
                                             Subsystem::A, cfg.quadrature);
    const auto r = measures(c, 1, neg, cfg.xi_check);
    j.xi.add(r);
    j.values = detail::pick(r, cfg);
    return j;
  });

  out.table.header = {"row",       "d",         "measure",  "value",    "far",   "deviation", "average",
                      "amplitude", "quantity",  "exponent", "window",   "fit_lo", "fit_hi"};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.d.push_back(static_cast<double>(ds[i]));
    out.xi.merge(jobs[i].xi);
    for (const auto& [m, v] : jobs[i].values) {
      out.deviation[m].push_back(v - out.far[m]);
      out.table.add({std::string("point"), ds[i], m, v, out.far[m], v - out.far[m], {}, {}, {}, {}, {}, {}, {}});
    }
  }

  out.window = cfg.window > 0 ? static_cast<std::size_t>(cfg.window)
                              : friedel_window(bias.k_FL, bias.k_FR, static_cast<double>(cfg.d_step));
  const double lo = cfg.fit_ratio_min * static_cast<double>(cfg.ell);
  const double hi = cfg.fit_ratio_max * static_cast<double>(cfg.ell);
  for (const auto& [m, dev] : out.deviation) {
    const auto prof = oscillation_profile(out.d, dev, out.window);
    std::vector<double> x, avg, amp;
    for (const auto& p : prof) {
      out.table.add({std::string("profile"), p.center, m, {}, {}, {}, p.average, p.amplitude, {}, {},
                     static_cast<long>(out.window), {}, {}});
      if (p.center >= lo && p.center <= hi) {
        x.push_back(p.center);
        avg.push_back(std::abs(p.average));
        amp.push_back(p.amplitude);
      }
    }
    if (x.size() < 3) continue;
    // Round-off-level deviations have no power law.
    const bool flat = *std::max_element(amp.begin(), amp.end()) < flat_deviation;
    for (const auto& [q, y] : {std::pair<const char*, const std::vector<double>*>{"average", &avg},
                               {"amplitude", &amp}}) {
      bool positive = std::all_of(y->begin(), y->end(), [](double v) { return v > 0; });
      const double e = !flat && positive ? power_law_exponent(x, *y) : NAN;
      out.fits.push_back({m, q, e, lo, hi});
      out.table.add({std::string("fit"), {}, m, {}, {}, {}, {}, {}, std::string(q), e,
                     static_cast<long>(out.window), lo, hi});
    }
  }
  return out;
}

/// Kernel table for every order and p on a uniform grid in [0, 1]. Order 1
/// rows carry q, q~ and the single-edge von Neumann kernel instead of Q.
inline CsvTable run_eval_asymptotics(const ExperimentConfig& cfg) {
  CsvTable t;
  t.header = {"n", "p", "Q", "Q_tilde", "q", "q_tilde", "q_single", "disjoint_log"};
  const auto steps = static_cast<long>(std::lround(1 / cfg.p_step));
  for (double n : cfg.orders)
    for (long i = 0; i <= steps; ++i) {
      const double p = std::min(1.0, static_cast<double>(i) * cfg.p_step);
      if (n == 1)
        t.add({n, p, 0.0, 0.0, q(p), q_tilde(p), q_single(p), disjoint_symmetric_log(n)});
      else
        t.add({n, p, Q_n(n, p), Q_tilde_n(n, p), {}, {}, {}, disjoint_symmetric_log(n)});
    }
  return t;
}

}  // namespace nessent
