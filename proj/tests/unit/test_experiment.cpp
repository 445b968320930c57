#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "nessent/nessent.hpp"

using namespace nessent;
constexpr double pi = std::numbers::pi;

namespace {

ExperimentConfig config(const std::string& text, const std::string& scenario) {
  std::istringstream in(text);
  return parse_config(in, scenario);
}

std::string parse_error(const std::string& text, const std::string& scenario) {
  try {
    config(text, scenario);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

const std::string length_text =
    "model = single_impurity\nepsilon0 = 1\nk_FL = 2*pi/3\nk_FR = pi/2\nell_min = 10\nell_max = 40\n";

}  // namespace

TEST(Config, Expressions) {
  const auto c = config(length_text + "ell_step = 5  # comment\n", "sweep-length");
  EXPECT_DOUBLE_EQ(c.k_FL, 2 * pi / 3);
  EXPECT_DOUBLE_EQ(c.k_FR, pi / 2);
  EXPECT_EQ(c.ell_step, 5);
  EXPECT_DOUBLE_EQ(parse_number("(1 + 2) * pi / -3"), -pi);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_THROW(parse_number("pi pi"), ParseError);
  EXPECT_THROW(parse_integer("2.5"), ParseError);
}

TEST(Config, MissingKeyIsNamed) {
  const auto msg = parse_error("model = single_impurity\nepsilon0 = 1\nell_min = 10\nell_max = 20\n", "sweep-length");
  EXPECT_NE(msg.find("k_FL"), std::string::npos) << msg;
  EXPECT_NE(parse_error("model = constant_t\n", "sweep-length").find("'T'"), std::string::npos);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(parse_error(length_text + "colour = blue\n", "sweep-length").find("line 7"), std::string::npos);
  EXPECT_NE(parse_error(length_text + "ell_step\n", "sweep-length").find("line 7"), std::string::npos);
  EXPECT_NE(parse_error(length_text + "k_FL = 1\n", "sweep-length").find("duplicate"), std::string::npos);
  EXPECT_NE(parse_error("model = single_impurity\nepsilon0 = x\nk_FL = 1\nk_FR = 1\nell_min = 1\nell_max = 2\n", "sweep-length").find("line 2"),
            std::string::npos);
}

TEST(Config, RangeChecks) {
  EXPECT_FALSE(parse_error(length_text + "k_FR = 4\n", "sweep-length").empty());
  EXPECT_FALSE(parse_error(length_text + "ell_step = 0\n", "sweep-length").empty());
  EXPECT_FALSE(parse_error(length_text + "measures = mi, entropy2\n", "sweep-length").empty());
  EXPECT_FALSE(parse_error(length_text, "sweep-sideways").empty());
  EXPECT_FALSE(parse_error("model = trivial\nk_FL = 2\nk_FR = 1\nell_L = 5\nell_R = 5\ndelta_min = 0\n"
                           "delta_max = 10\nmeasures = negativity\n",
                           "sweep-position")
                   .empty());
  EXPECT_THROW(parse_config_file("/nonexistent/x.conf", "sweep-length"), IoError);
}

TEST(Config, ListsAndFlags) {
  const auto c = config("model = constant_t\nT = 0.25\nk_FR = pi/2\ndelta_k = pi/6, pi/12\nell_min = 10\n"
                        "ell_max = 30\norders = 1, 2\nxi_check = true\n",
                        "sweep-bias");
  ASSERT_EQ(c.delta_k.size(), 2u);
  EXPECT_DOUBLE_EQ(c.delta_k[1], pi / 12);
  EXPECT_EQ(c.orders, (std::vector<double>{1, 2}));
  EXPECT_TRUE(c.xi_check);
  EXPECT_EQ(std::get<ConstantT>(c.make_model().variant()).T, 0.25);
}

TEST(Csv, RoundTripAndFormat) {
  CsvTable t;
  t.header = {"a", "b", "c", "d"};
  t.add({1.0 / 3, 7L, std::string("x,y"), std::monostate{}});
  t.add({NAN, -2L, std::string("q\"uote"), 1e-300});
  std::ostringstream out;
  write_csv(t, out);
  const std::string s = out.str();
  EXPECT_EQ(s.find('\r'), std::string::npos);
  EXPECT_NE(s.find("0.333333333333,"), std::string::npos);
  EXPECT_NE(s.find("\"x,y\""), std::string::npos);
  std::istringstream in(s);
  const auto back = read_csv(in);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_NEAR(std::get<double>(back.rows[0][0]), 1.0 / 3, 1e-12);
  EXPECT_EQ(std::get<double>(back.rows[0][1]), 7.0);
  EXPECT_EQ(std::get<std::string>(back.rows[0][2]), "x,y");
  EXPECT_TRUE(std::holds_alternative<std::monostate>(back.rows[0][3]));
  EXPECT_TRUE(std::isnan(std::get<double>(back.rows[1][0])));
  EXPECT_EQ(std::get<std::string>(back.rows[1][2]), "q\"uote");
  EXPECT_THROW(t.add({1.0}), LengthMismatch);
  EXPECT_EQ(t.column("c"), 2u);
}

TEST(Fit, ExactOffset) {
  const std::vector<double> a{0.1, 0.5, 0.9, 1.4, 2.0};
  std::vector<double> n;
  for (double v : a) n.push_back(v - 0.25);
  const auto f = fit_constant(n, a);
  EXPECT_NEAR(f.offset, -0.25, 1e-15);
  EXPECT_NEAR(f.residual_max, 0, 1e-15);
  EXPECT_EQ(a[0], 0.1);
}

TEST(Fit, NoiseBound) {
  const double eps = 1e-3;
  std::vector<double> a, n;
  for (int i = 0; i < 40; ++i) {
    a.push_back(0.1 * i);
    n.push_back(0.1 * i + 2 + eps * std::sin(1.7 * i));
  }
  const auto f = fit_constant(n, a);
  EXPECT_NEAR(f.offset, 2, eps);
  EXPECT_LE(f.residual_max, 2 * eps);
  EXPECT_LE(f.residual_rms, f.residual_max);
}

TEST(Fit, LengthChecks) {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  EXPECT_THROW(fit_constant(a, b), LengthMismatch);
  EXPECT_THROW(fit_constant(b, b), LengthMismatch);
  SlopeDriver d{{1, 2}, 1, false};
  EXPECT_THROW(fit_constant(a, a, &d), LengthMismatch);
}

TEST(Fit, SlopeAndPowerLaw) {
  std::vector<double> x, y, z;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(10.0 * i);
    y.push_back(0.3 * x.back() + 0.7 * std::log(x.back()) - 4);
    z.push_back(5 * std::pow(x.back(), -1.5));
  }
  EXPECT_NEAR(fitted_slope(x, y, true), 0.3, 1e-10);
  EXPECT_NEAR(power_law_exponent(x, z), -1.5, 1e-12);
  SlopeDriver d{x, 0.3, true};
  const auto f = fit_constant(y, y, &d);
  EXPECT_LT(f.slope_check->relative_error, 1e-9);
}

TEST(Friedel, WindowCoversBothPeriods) {
  EXPECT_EQ(friedel_window(2 * pi / 3, pi / 2), 6u);
  EXPECT_EQ(friedel_window(pi / 2, pi / 2), 2u);
  EXPECT_EQ(friedel_window(pi / 3, pi / 4), 12u);
  // Incommensurate momenta fall back to one period of k_FL + k_FR.
  EXPECT_EQ(friedel_window(1.0, 0.9), static_cast<std::size_t>(std::lround(2 * pi / 1.9)));
}

TEST(Friedel, ProfileRecoversPowerLaws) {
  const double kl = 2 * pi / 3, kr = pi / 2;
  std::vector<double> x, y;
  for (int d = 100; d <= 4000; ++d) {
    x.push_back(d);
    y.push_back(20 * std::pow(d, -2.0) + std::pow(d, -1.0) * (std::cos(2 * kl * d) + 0.5 * std::cos(2 * kr * d)));
  }
  const auto prof = oscillation_profile(x, y, friedel_window(kl, kr));
  std::vector<double> c, avg, amp;
  for (const auto& p : prof)
    if (p.center > 1000) {
      c.push_back(p.center);
      avg.push_back(std::abs(p.average));
      amp.push_back(p.amplitude);
    }
  EXPECT_NEAR(power_law_exponent(c, avg), -2, 0.05);
  EXPECT_NEAR(power_law_exponent(c, amp), -1, 0.05);
}

TEST(Pool, OrderAndErrors) {
  for (unsigned threads : {1u, 3u, 8u}) {
    const auto v = parallel_map(100, threads, [](std::size_t i) { return 3 * i; });
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], 3 * i);
  }
  EXPECT_TRUE(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
  EXPECT_THROW(parallel_map(20, 4,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                              return i;
                            }),
               std::runtime_error);
}

TEST(Sweeps, TrivialModelIsUncorrelated) {
  auto c = config("model = trivial\nk_FL = 2*pi/3\nk_FR = pi/2\nell_min = 4\nell_max = 12\nell_step = 4\n",
                  "sweep-length");
  const auto r = run_sweep_length(c, 2);
  for (const auto& s : r.fits)
    if (s.measure != "ci")
      for (double v : s.numeric) EXPECT_NEAR(v, 0, 1e-9) << s.measure;
  EXPECT_NEAR(r.series("mi").fit.residual_max, 0, 1e-9);
}

TEST(Sweeps, ZeroBiasGivesZeroMutualInformation) {
  auto c = config("model = single_impurity\nepsilon0 = 1\nk_FR = pi/2\ndelta_k = 0, pi/12\nell_min = 5\n"
                  "ell_max = 15\nell_step = 5\nmeasures = mi\n",
                  "sweep-bias");
  const auto r = run_sweep_bias(c, 2);
  for (double v : r.series("mi", 1, 0).numeric) EXPECT_NEAR(v, 0, 1e-9);
  for (double v : r.series("mi", 1, 0).analytic) EXPECT_EQ(v, 0.0);
  EXPECT_GT(r.series("mi", 1, pi / 12).numeric.back(), 0.01);
}

TEST(Sweeps, BiasAndLengthAgree) {
  const auto len = run_sweep_length(config(length_text + "ell_step = 10\nmeasures = mi\n", "sweep-length"), 2);
  const auto bias = run_sweep_bias(
      config("model = single_impurity\nepsilon0 = 1\nk_FR = pi/2\ndelta_k = pi/6\nell_min = 10\n"
             "ell_max = 40\nell_step = 10\nmeasures = mi\n",
             "sweep-bias"),
      2);
  const auto& a = len.series("mi");
  const auto& b = bias.series("mi");
  ASSERT_EQ(a.numeric.size(), b.numeric.size());
  for (std::size_t i = 0; i < a.numeric.size(); ++i) EXPECT_NEAR(a.numeric[i], b.numeric[i], 1e-12);
}

TEST(Sweeps, DeterministicAcrossThreadCounts) {
  const auto c = config(length_text + "ell_step = 10\nxi_check = true\n", "sweep-length");
  std::ostringstream one, many;
  write_csv(run_sweep_length(c, 1).table, one);
  write_csv(run_sweep_length(c, 4).table, many);
  EXPECT_EQ(one.str(), many.str());
}

TEST(Sweeps, PositionRegimes) {
  const auto c = config("model = single_impurity\nepsilon0 = 1\nk_FL = 2*pi/3\nk_FR = pi/2\nell_L = 10\n"
                        "ell_R = 20\nd_R = 1000\ndelta_min = -30\ndelta_max = 30\ndelta_step = 5\nmeasures = mi\n",
                        "sweep-position");
  const auto r = run_sweep_position(c, 2);
  const auto ri = r.table.column("regime"), di = r.table.column("delta"), mi = r.table.column("ell_mirror");
  for (const auto& row : r.table.rows) {
    if (std::get<std::string>(row[0]) != "point") continue;
    const long delta = std::get<long>(row[di]);
    const SubsystemGeometry g{0, 1000 + delta, 10, 1000, 20};
    EXPECT_EQ(std::get<long>(row[mi]), mirror_overlap(g).ell_mirror);
    const std::string want = delta <= -10 || delta >= 20 ? "disjoint" : (delta >= 0 && delta <= 10 ? "contained" : "partial");
    EXPECT_EQ(std::get<std::string>(row[ri]), want) << delta;
  }
}

TEST(Sweeps, DistanceOnTrivialModel) {
  // Without scattering the blocks are translation invariant, so only the
  // free-sea cross correlations change with d and CI moves with MI.
  const auto c = config("model = trivial\nk_FL = 2*pi/3\nk_FR = pi/2\nell = 3\nd_min = 10\nd_max = 40\n"
                        "fit_ratio_min = 3\nfit_ratio_max = 12\nmeasures = mi, ci\n",
                        "sweep-distance");
  const auto r = run_sweep_distance(c, 2);
  EXPECT_EQ(r.window, 6u);
  const auto& mi = r.deviation.at("mi");
  const auto& ci = r.deviation.at("ci");
  for (std::size_t i = 0; i < mi.size(); ++i) {
    EXPECT_NEAR(mi[i], ci[i], 1e-12);
    EXPECT_GT(mi[i], 0);
  }
  EXPECT_NEAR(r.far.at("mi"), 0, 1e-12);
  EXPECT_LT(mi.back(), mi.front());
}

TEST(Sweeps, DistanceApproachesFarLimit) {
  const auto c = config("model = single_impurity\nepsilon0 = 1\nk_FL = 2*pi/3\nk_FR = pi/2\nell = 4\n"
                        "d_min = 20\nd_max = 200\nd_step = 1\nfit_ratio_min = 10\nfit_ratio_max = 50\n"
                        "measures = mi\n",
                        "sweep-distance");
  const auto r = run_sweep_distance(c, 2);
  const auto& dev = r.deviation.at("mi");
  EXPECT_LT(std::abs(dev.back()), std::abs(dev.front()));
  EXPECT_LT(r.exponent("mi", "average"), -1.5);
}

TEST(Asymptotics, KernelTable) {
  const auto c = config("model = trivial\norders = 1, 2\np_step = 0.25\n", "eval-asymptotics");
  const auto t = run_eval_asymptotics(c);
  EXPECT_EQ(t.rows.size(), 10u);
  EXPECT_NEAR(std::get<double>(t.rows[9][t.column("Q")]), 0, 1e-9);
  EXPECT_DOUBLE_EQ(std::get<double>(t.rows[0][t.column("disjoint_log")]), 2.0 / 3);
}

TEST(Selftest, AllCasesPass) {
  std::ostringstream out;
  EXPECT_EQ(run_selftest(out), 0) << out.str();
}
