#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nessent/asymptotics.hpp"
#include "nessent/entanglement.hpp"
#include "nessent/experiment/config.hpp"
#include "nessent/experiment/csv.hpp"
#include "nessent/experiment/fit.hpp"
#include "nessent/experiment/pool.hpp"

namespace nessent {

struct SelftestCase {
  std::string name;
  std::function<std::string()> run;  // empty string on success, else a reason
};

namespace detail {

inline std::string expect_close(double got, double want, double tol) {
  if (std::abs(got - want) <= tol) return {};
  std::ostringstream s;
  s.precision(12);
  s << "got " << got << ", want " << want << " (tol " << tol << ")";
  return s.str();
}

inline CorrelationMatrix bell_pair() {
  CorrelationMatrix c;
  c.matrix = ComplexMatrix(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) c.matrix(i, j) = 0.5;
  c.sites_L = {-1};
  c.sites_R = {1};
  return c;
}

}  // namespace detail

inline std::vector<SelftestCase> selftest_cases() {
  using detail::expect_close;
  const double pi = std::numbers::pi, ln2 = std::numbers::ln2;
  const BiasState biased(2 * pi / 3, pi / 2);
  std::vector<SelftestCase> cases;

  cases.push_back({"trivial model has no far-limit correlations", [=] {
    const auto c = correlation_matrix_far(Trivial{}, biased, SubsystemGeometry::symmetric(20, 0), Subsystem::A);
    const auto r = measures(c, 1, true);
    if (auto e = expect_close(r.mutual_info, 0, 1e-8); !e.empty()) return "MI " + e;
    // Square roots of C_Xi eigenvalues near 0 lift round-off to ~1e-8.
    return expect_close(*r.negativity, 0, 1e-6);
  }});
  cases.push_back({"constant T = 1/2 volume coefficient", [=] {
    return expect_close(volume_coefficient_mi(ConstantT{0.5}, biased, 1), ln2 / 6, 1e-12);
  }});
  cases.push_back({"Q_1 vanishes and Q_n(1) = 0", [] {
    for (double p : {0.0, 0.3, 1.0})
      if (auto e = expect_close(Q_n(1, p), 0, 1e-10); !e.empty()) return e;
    for (double n : {2.0, 3.0})
      if (auto e = expect_close(Q_n(n, 1), 0, 1e-9); !e.empty()) return e;
    return std::string();
  }});
  cases.push_back({"Q~ is symmetric under T <-> R", [] {
    for (double t : {0.1, 0.3, 0.45})
      if (auto e = expect_close(Q_tilde_n(2, t), Q_tilde_n(2, 1 - t), 1e-10); !e.empty()) return e;
    return std::string();
  }});
  cases.push_back({"disjoint log coefficient", [] {
    return expect_close(disjoint_symmetric_log(1), 2.0 / 3, 1e-15) +
           expect_close(disjoint_symmetric_log(2), 0.5, 1e-15);
  }});
  cases.push_back({"negativity slope is half the order-1/2 MI slope", [=] {
    const ScatteringModel m = SingleImpurity{1, 1};
    const auto g = SubsystemGeometry::symmetric(40, 0);
    return expect_close(negativity_prediction(m, biased, g).linear_term,
                        0.5 * mi_prediction(m, biased, g, 0.5).linear_term, 1e-12);
  }});
  cases.push_back({"MI prediction is invariant under L <-> R relabeling", [=] {
    const ScatteringModel m = SingleImpurity{1, 1};
    const SubsystemGeometry a{0, 130, 40, 100, 70}, b{0, 100, 70, 130, 40};
    return expect_close(mi_prediction(m, biased, a, 1).log_term, mi_prediction(m, biased, b, 1).log_term, 1e-10);
  }});
  cases.push_back({"two-site Bell pair", [=] {
    const auto c = detail::bell_pair();
    const auto r = measures(c, 1, true);
    return expect_close(r.mutual_info, 2 * ln2, 1e-12) + expect_close(*r.negativity, ln2, 1e-12);
  }});
  cases.push_back({"finite distance converges to the far limit", [=] {
    const ScatteringModel m = SingleImpurity{1, 1};
    const auto far = measures(correlation_matrix_far(m, biased, SubsystemGeometry::symmetric(10, 400), Subsystem::A), 1);
    const auto fin = measures(correlation_matrix_finite(m, biased, SubsystemGeometry::symmetric(10, 400), Subsystem::A), 1);
    return expect_close(fin.mutual_info, far.mutual_info, 0.02);
  }});
  cases.push_back({"C_Xi spectra from both solvers agree", [=] {
    const ScatteringModel m = SingleImpurity{2, 1};
    const auto c = correlation_matrix_far(m, biased, SubsystemGeometry::symmetric(15, 0), Subsystem::A);
    const auto r = fermionic_negativity_detail(c, 1, XiSpectrum::hermitian_similarity, true);
    if (r.max_imag_eigen >= imaginary_tolerance) return std::string("imaginary eigenvalue ") + std::to_string(r.max_imag_eigen);
    return expect_close(r.spectrum_gap, 0, 1e-8);
  }});
  cases.push_back({"constant fit recovers an exact offset", [] {
    const std::vector<double> a{1, 2, 3, 4}, n{1.7, 2.7, 3.7, 4.7};
    const auto f = fit_constant(n, a);
    return expect_close(f.offset, 0.7, 1e-14) + expect_close(f.residual_max, 0, 1e-14);
  }});
  cases.push_back({"CSV round trip keeps 12 digits", [] {
    CsvTable t;
    t.header = {"x", "y"};
    t.add({std::numbers::pi, -1.0 / 3});
    std::stringstream s;
    write_csv(t, s);
    const auto back = read_csv(s);
    const double x = std::get<double>(back.rows.at(0).at(0));
    return expect_close(x, std::numbers::pi, 1e-11 * std::numbers::pi);
  }});
  cases.push_back({"config errors name the missing key", [] {
    std::istringstream in("model = single_impurity\nepsilon0 = 1\n");
    try {
      parse_config(in, "sweep-length");
    } catch (const ParseError& e) {
      return std::string(e.what()).find("k_FL") != std::string::npos ? std::string() : std::string(e.what());
    }
    return std::string("no error raised");
  }});
  cases.push_back({"worker pool keeps input order", [] {
    const auto v = parallel_map(50, 4, [](std::size_t i) { return static_cast<double>(i * i); });
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != static_cast<double>(i * i)) return std::string("out of order at ") + std::to_string(i);
    return std::string();
  }});
  return cases;
}

/// Prints one PASS/FAIL line per case; returns the number of failures.
inline int run_selftest(std::ostream& out) {
  int failed = 0;
  for (const auto& c : selftest_cases()) {
    std::string reason;
    try {
      reason = c.run();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    if (reason.empty()) {
      out << "PASS " << c.name << '\n';
    } else {
      out << "FAIL " << c.name << ": " << reason << '\n';
      ++failed;
    }
  }
  return failed;
}

}  // namespace nessent
