// Command-line runner: nessent <scenario> --config <path> [--out <path>] [--threads N]

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nessent/nessent.hpp"

namespace {

void print_error(const char* kind, const std::string& message) {
  nlohmann::json j{{"status", "error"}, {"kind", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

void summarize(const nessent::SweepResult& r) {
  for (const auto& s : r.fits) {
    std::fprintf(stderr, "fit %-10s n=%-6g dk=%-8.5g offset=%.6g residual_max=%.3g rms=%.3g", s.measure.c_str(),
                 s.order, s.delta_k, s.fit.offset, s.fit.residual_max, s.fit.residual_rms);
    if (s.fit.slope_check)
      std::fprintf(stderr, " slope=%.6g predicted=%.6g", s.fit.slope_check->fitted, s.fit.slope_check->predicted);
    std::fputc('\n', stderr);
  }
  if (r.xi.evaluations)
    std::fprintf(stderr, "negativity: %zu evaluations, max discarded imaginary part %.3g\n", r.xi.evaluations,
                 r.xi.max_imag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement in biased free-fermion chains with a scatterer"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  unsigned threads = nessent::default_threads();

  for (const auto& name : nessent::scenario_names()) {
    auto* sub = app.add_subcommand(name);
    auto* cfg = sub->add_option("--config,-c", config_path, "key = value config file")->check(CLI::ExistingFile);
    if (name != "selftest") cfg->required();
    sub->add_option("--out,-o", out_path, "CSV output path (default: config 'out', else stdout)");
    sub->add_option("--threads,-j", threads, "worker threads (default: NESSENT_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string scenario = app.get_subcommands().front()->get_name();

  try {
    if (scenario == "selftest") {
      const int failed = nessent::run_selftest(std::cout);
      return failed == 0 ? 0 : 1;
    }
    const auto cfg = nessent::parse_config_file(config_path, scenario);
    if (out_path.empty()) out_path = cfg.out;

    nessent::CsvTable table;
    if (scenario == "sweep-length" || scenario == "sweep-bias" || scenario == "sweep-position") {
      const auto r = scenario == "sweep-length"   ? nessent::run_sweep_length(cfg, threads)
                     : scenario == "sweep-bias"   ? nessent::run_sweep_bias(cfg, threads)
                                                  : nessent::run_sweep_position(cfg, threads);
      summarize(r);
      table = r.table;
    } else if (scenario == "sweep-distance") {
      const auto r = nessent::run_sweep_distance(cfg, threads);
      std::fprintf(stderr, "window %zu samples\n", r.window);
      for (const auto& f : r.fits)
        std::fprintf(stderr, "fit %-10s %-9s exponent=%.4g over d in [%g, %g]\n", f.measure.c_str(),
                     f.quantity.c_str(), f.exponent, f.fit_lo, f.fit_hi);
      table = r.table;
    } else {
      table = nessent::run_eval_asymptotics(cfg);
    }

    if (out_path.empty())
      nessent::write_csv(table, std::cout);
    else
      nessent::emit_csv(table, out_path);
  } catch (const nessent::Error& e) {
    print_error(e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("std::exception", e.what());
    return 2;
  }
  return 0;
}
