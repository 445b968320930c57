#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nessent/errors.hpp"
#include "nessent/numerics/quadrature.hpp"
#include "nessent/scattering.hpp"

namespace nessent {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"sweep-length",   "sweep-position",
                                              "sweep-bias",     "sweep-distance",
                                              "eval-asymptotics", "selftest"};
  return names;
}

struct ExperimentConfig {
  std::string scenario;

  std::string model = "single_impurity";  // single_impurity | constant_t | trivial
  double epsilon0 = 1;
  double eta = 1;
  double T = 0.5;

  double k_FL = 2 * std::numbers::pi / 3;
  double k_FR = std::numbers::pi / 2;

  // sweep-length, sweep-bias
  long ell_min = 20, ell_max = 200, ell_step = 10;
  std::vector<double> delta_k;  // sweep-bias: k_FL = k_FR + delta_k

  // sweep-position: d_L = d_R + delta
  long ell_L = 100, ell_R = 200;
  long delta_min = -200, delta_max = 300, delta_step = 10;
  long d_R = 100000;

  // sweep-distance
  long ell = 50;
  long d_min = 100, d_max = 2000, d_step = 1;
  long window = 0;  // 0: chosen from the Fermi momenta
  double fit_ratio_min = 20, fit_ratio_max = 40;

  // eval-asymptotics
  double p_step = 0.1;

  std::vector<std::string> measures{"mi", "ci", "negativity"};
  std::vector<double> orders{1};
  std::string out;
  QuadratureSpec quadrature;
  bool xi_check = false;  // also diagonalize C_Xi with the general solver

  ScatteringModel make_model() const {
    if (model == "single_impurity") return SingleImpurity{epsilon0, eta};
    if (model == "constant_t") return ConstantT{T};
    if (model == "trivial") return Trivial{};
    throw ParseError("unknown model '" + model + "'");
  }
  BiasState bias() const { return BiasState(k_FL, k_FR); }
  bool wants(const std::string& m) const {
    return std::find(measures.begin(), measures.end(), m) != measures.end();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Arithmetic on numbers and `pi` with + - * / and parentheses.
class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("bad number '" + std::string(s_) + "': " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("expected a number or pi");
    }
    pos_ += used;
    return v;
  }
};

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

/// Evaluates a numeric config value such as `2*pi/3` or `1e-10`.
inline double parse_number(const std::string& text) {
  return detail::ExprParser(text).parse();
}

inline long parse_integer(const std::string& text) {
  const double v = parse_number(text);
  if (!std::isfinite(v) || v != std::round(v)) throw ParseError("expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

/// Raw `key = value` pairs with the line each came from.
struct ConfigEntries {
  std::map<std::string, std::pair<std::string, int>> values;
};

inline ConfigEntries read_entries(std::istream& in) {
  ConfigEntries e;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    if (value.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    if (!e.values.emplace(key, std::make_pair(value, lineno)).second)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return e;
}

namespace detail {

inline std::set<std::string> required_keys(const std::string& scenario, const std::string& model) {
  std::set<std::string> req;
  if (scenario == "selftest") return req;
  req.insert("model");
  if (model == "single_impurity") req.insert("epsilon0");
  if (model == "constant_t") req.insert("T");
  if (scenario == "sweep-length") req.insert({"k_FL", "k_FR", "ell_min", "ell_max"});
  if (scenario == "sweep-bias") req.insert({"k_FR", "delta_k", "ell_min", "ell_max"});
  if (scenario == "sweep-position") req.insert({"k_FL", "k_FR", "ell_L", "ell_R", "delta_min", "delta_max"});
  if (scenario == "sweep-distance") req.insert({"k_FL", "k_FR", "ell", "d_min", "d_max"});
  if (scenario == "eval-asymptotics") req.insert("orders");
  return req;
}

}  // namespace detail

/// Checks ranges and momenta once every field is set.
inline void validate_config(const ExperimentConfig& c) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end())
    throw ParseError("unknown scenario '" + c.scenario + "'");
  if (c.scenario == "selftest") return;
  (void)c.make_model();
  auto momentum = [](double k, const char* name) {
    if (!(k > 0 && k < std::numbers::pi)) throw ParseError(std::string(name) + " must lie in (0, pi)");
  };
  momentum(c.k_FL, "k_FL");
  momentum(c.k_FR, "k_FR");
  auto range = [](long lo, long hi, long step, const char* name, long floor) {
    if (step < 1) throw ParseError(std::string(name) + ": step must be >= 1");
    if (lo > hi) throw ParseError(std::string(name) + ": empty range");
    if (lo < floor) throw ParseError(std::string(name) + ": values must be >= " + std::to_string(floor));
  };
  if (c.scenario == "sweep-length" || c.scenario == "sweep-bias")
    range(c.ell_min, c.ell_max, c.ell_step, "ell", 1);
  if (c.scenario == "sweep-bias") {
    if (c.delta_k.empty()) throw ParseError("delta_k: empty list");
    for (double dk : c.delta_k) momentum(c.k_FR + dk, "k_FR + delta_k");
  }
  if (c.scenario == "sweep-position") {
    if (c.ell_L < 1 || c.ell_R < 1) throw ParseError("ell_L and ell_R must be >= 1");
    range(c.delta_min, c.delta_max, c.delta_step, "delta", -c.d_R);
  }
  if (c.scenario == "sweep-distance") {
    if (c.ell < 1) throw ParseError("ell must be >= 1");
    range(c.d_min, c.d_max, c.d_step, "d", 0);
    if (c.window < 0) throw ParseError("window must be >= 0");
    if (!(c.fit_ratio_min < c.fit_ratio_max)) throw ParseError("fit_ratio_min must be < fit_ratio_max");
  }
  if (c.scenario == "eval-asymptotics" && !(c.p_step > 0 && c.p_step <= 1))
    throw ParseError("p_step must lie in (0, 1]");
  static const std::set<std::string> known{"mi", "ci", "negativity", "entropy"};
  if (c.measures.empty()) throw ParseError("measures: empty list");
  for (const auto& m : c.measures)
    if (!known.count(m)) throw ParseError("unknown measure '" + m + "'");
  if (c.scenario == "sweep-position")
    for (const auto& m : c.measures)
      if (m != "mi" && m != "ci") throw ParseError("sweep-position supports only mi and ci");
  if (c.orders.empty()) throw ParseError("orders: empty list");
  for (double n : c.orders)
    if (!(n > 0)) throw ParseError("orders must be > 0");
  c.quadrature.validate();
}

/// Parses a config stream. `scenario` (if non-empty) overrides or must match
/// a `scenario` key in the file.
inline ExperimentConfig parse_config(std::istream& in, const std::string& scenario = {}) {
  const auto entries = read_entries(in);
  ExperimentConfig c;
  std::set<std::string> used;

  auto find = [&](const std::string& key) -> const std::pair<std::string, int>* {
    auto it = entries.values.find(key);
    if (it == entries.values.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };
  auto wrap = [](const std::pair<std::string, int>& v, const std::string& key, auto&& f) {
    try {
      return f(v.first);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(v.second) + ": " + key + ": " + e.what());
    }
  };
  auto get_str = [&](const std::string& key, std::string& dst) {
    if (auto v = find(key)) dst = v->first;
  };
  auto get_num = [&](const std::string& key, double& dst) {
    if (auto v = find(key)) dst = wrap(*v, key, parse_number);
  };
  auto get_int = [&](const std::string& key, long& dst) {
    if (auto v = find(key)) dst = wrap(*v, key, parse_integer);
  };
  auto get_nums = [&](const std::string& key, std::vector<double>& dst) {
    if (auto v = find(key)) {
      dst.clear();
      for (const auto& s : detail::split_list(v->first)) dst.push_back(wrap(*v, key, [&](const std::string&) {
        return parse_number(s);
      }));
    }
  };

  get_str("scenario", c.scenario);
  if (!scenario.empty()) {
    if (!c.scenario.empty() && c.scenario != scenario)
      throw ParseError("config is for scenario '" + c.scenario + "', not '" + scenario + "'");
    c.scenario = scenario;
  }
  get_str("model", c.model);
  std::vector<std::string> missing;
  for (const auto& key : detail::required_keys(c.scenario, c.model))
    if (!entries.values.count(key)) missing.push_back("'" + key + "'");
  if (!missing.empty()) {
    std::string list = missing.front();
    for (std::size_t i = 1; i < missing.size(); ++i) list += ", " + missing[i];
    throw ParseError(std::string(missing.size() == 1 ? "missing required key " : "missing required keys ") + list);
  }

  get_num("epsilon0", c.epsilon0);
  get_num("eta", c.eta);
  get_num("T", c.T);
  get_num("k_FL", c.k_FL);
  get_num("k_FR", c.k_FR);
  get_int("ell_min", c.ell_min);
  get_int("ell_max", c.ell_max);
  get_int("ell_step", c.ell_step);
  get_nums("delta_k", c.delta_k);
  get_int("ell_L", c.ell_L);
  get_int("ell_R", c.ell_R);
  get_int("delta_min", c.delta_min);
  get_int("delta_max", c.delta_max);
  get_int("delta_step", c.delta_step);
  get_int("d_R", c.d_R);
  get_int("ell", c.ell);
  get_int("d_min", c.d_min);
  get_int("d_max", c.d_max);
  get_int("d_step", c.d_step);
  get_int("window", c.window);
  get_num("fit_ratio_min", c.fit_ratio_min);
  get_num("fit_ratio_max", c.fit_ratio_max);
  get_num("p_step", c.p_step);
  if (auto v = find("measures")) c.measures = detail::split_list(v->first);
  get_nums("orders", c.orders);
  get_str("out", c.out);
  if (auto v = find("xi_check")) {
    if (v->first == "true") c.xi_check = true;
    else if (v->first == "false") c.xi_check = false;
    else throw ParseError("line " + std::to_string(v->second) + ": xi_check must be true or false");
  }
  get_num("quad_abs_tol", c.quadrature.abs_tol);
  get_num("quad_rel_tol", c.quadrature.rel_tol);
  double panels = c.quadrature.max_panels, nodes = c.quadrature.nodes_per_panel;
  get_num("quad_max_panels", panels);
  get_num("quad_nodes", nodes);
  c.quadrature.max_panels = static_cast<int>(panels);
  c.quadrature.nodes_per_panel = static_cast<int>(nodes);

  for (const auto& [key, v] : entries.values)
    if (!used.count(key)) throw ParseError("line " + std::to_string(v.second) + ": unknown key '" + key + "'");
  try {
    validate_config(c);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return c;
}

inline ExperimentConfig parse_config_file(const std::string& path, const std::string& scenario = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_config(in, scenario);
}

}  // namespace nessent
