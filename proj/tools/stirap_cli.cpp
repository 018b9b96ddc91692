// Command-line front end: run experiment configs, list experiments, run checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stirap/checks.hpp"
#include "stirap/config.hpp"
#include "stirap/experiments.hpp"
#include "stirap/output.hpp"

namespace fs = std::filesystem;
using namespace stirap;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitChecks = 4;

struct CatalogEntry {
  ExperimentKind kind;
  const char* figure;
  const char* outputs;
  const char* description;
  const char* defaults;
  const char* source;
};

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {ExperimentKind::adiabaticity, "Fig. 2", "fig2.csv",
       "non-adiabatic coupling vs dressed splitting along a schedule",
       "t_pulse = 100 us, t_delay in {30, 80, 130} us, threshold 10", "publication (pulse values), design (threshold)"},
      {ExperimentKind::delay_scan, "Fig. 3a", "fig3a.csv", "transfer vs signed pulse delay",
       "carrier, ground state, t_pulse = 120 us, delay -150..150 us", "publication"},
      {ExperimentKind::map_2d, "Fig. 4a / 5a", "fig4.csv | fig5.csv", "transfer over pulse length x delay scaling",
       "t_pulse 5..200 us (40), s 0.05..1.0 (20), ground state", "publication (axes), design (grid density)"},
      {ExperimentKind::fock_dynamics, "Fig. 6", "fig6a.csv | fig6b.csv", "time-resolved transfer per Fock state",
       "carrier s = 0.7, t_pulse = 50 us, n = 0..14", "publication"},
      {ExperimentKind::thermal_pulse_length_scan, "comp_thermal", "comp_thermal.csv",
       "truncated-sequence transfer vs pulse length, ground and thermal",
       "s = 0.5, truncated, nbar = 11.5, t_pulse 10..200 us", "publication (s), inferred (nbar)"},
      {ExperimentKind::compare_rabi_stirap, "Fig. 7", "fig7a.csv | fig7b.csv", "Raman Rabi vs STIRAP on a thermal state",
       "blue sideband s = 0.5 (carrier s = 0.7), truncated, nbar = 11.5", "publication (s), inferred (nbar)"},
      {ExperimentKind::thermometry, "thermometry", "thermometry.json",
       "ground-state population from BSB - RSB plateaus, temperature in Doppler units",
       "window 120..150 us, trap 2.2 MHz, linewidth 41.3 MHz", "publication (window), config (trap, linewidth)"},
  };
  return entries;
}

int list_command(bool json) {
  if (json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& e : catalog()) {
      j.push_back({{"kind", to_string(e.kind)},
                   {"figure", e.figure},
                   {"outputs", e.outputs},
                   {"description", e.description},
                   {"defaults", e.defaults},
                   {"source", e.source}});
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  for (const auto& e : catalog()) {
    std::cout << to_string(e.kind) << " -> " << e.figure << " [" << e.outputs << "]\n"
              << "    " << e.description << "\n    defaults: " << e.defaults << " (" << e.source << ")\n";
  }
  return 0;
}

void emit_sweep(const fs::path& dir, const SweepResult& result, const std::string& hash, int y_column) {
  std::ostringstream csv;
  write_sweep_csv(csv, result, hash);
  write_text(dir, result.name + ".csv", csv.str());
  write_text(dir, result.name + ".json", sweep_metadata_json(result, hash));
  write_text(dir, result.name + ".gp", gnuplot_stub(result.name, result.name + ".csv", 2, y_column, hash));
}

void write_failures(const fs::path& dir, const SweepResult& result, const std::string& hash) {
  nlohmann::ordered_json j;
  j["config_hash"] = hash;
  j["result"] = result.name;
  nlohmann::ordered_json failed = nlohmann::ordered_json::array();
  for (const auto& p : result.points) {
    if (p.diagnostics.failed) failed.push_back({{"series", p.series}, {"coords", p.coords}, {"error", p.diagnostics.error}});
  }
  j["failures"] = failed;
  write_text(dir, "failures.json", j.dump(2) + "\n");
}

/// Returns the number of failed sweep points.
std::size_t run_experiment(const RunConfig& config, const fs::path& dir) {
  const SweepSpec& spec = config.spec;
  const std::string& hash = config.hash;
  std::size_t failures = 0;
  auto finish = [&](const SweepResult& r, int y_column) {
    emit_sweep(dir, r, hash, y_column);
    if (r.failures()) write_failures(dir, r, hash);
    failures += r.failures();
    std::cout << "wrote " << (dir / (r.name + ".csv")).string() << " (" << r.points.size() << " points, "
              << r.failures() << " failed, " << r.wall_time_s << " s)\n";
  };
  const int efficiency_column = static_cast<int>(spec.axes.size()) + 2;
  switch (spec.kind) {
    case ExperimentKind::adiabaticity: {
      const auto traces = adiabaticity_scan(spec);
      std::vector<double> delays;
      for (const auto& axis : spec.axes) {
        if (axis.name == "t_delay") delays = axis.values;
      }
      std::ostringstream csv;
      write_adiabaticity_csv(csv, traces, delays, hash);
      write_text(dir, "fig2.csv", csv.str());
      write_text(dir, "fig2.gp", gnuplot_stub("adiabaticity", "fig2.csv", 2, 3, hash));
      std::cout << "wrote " << (dir / "fig2.csv").string() << '\n';
      break;
    }
    case ExperimentKind::delay_scan: finish(delay_scan(spec), 3); break;
    case ExperimentKind::map_2d: finish(map_2d(spec), efficiency_column); break;
    case ExperimentKind::fock_dynamics: {
      const auto dyn = fock_dynamics(spec);
      std::ostringstream csv;
      write_fock_dynamics_csv(csv, dyn, spec.initial.target, hash);
      write_text(dir, dyn.summary.name + ".csv", csv.str());
      write_text(dir, dyn.summary.name + ".json", sweep_metadata_json(dyn.summary, hash));
      std::ostringstream final_csv;
      write_sweep_csv(final_csv, dyn.summary, hash);
      write_text(dir, dyn.summary.name + "_final.csv", final_csv.str());
      write_text(dir, dyn.summary.name + ".gp", gnuplot_stub(dyn.summary.name, dyn.summary.name + ".csv", 2, 3, hash));
      if (dyn.summary.failures()) write_failures(dir, dyn.summary, hash);
      failures += dyn.summary.failures();
      std::cout << "wrote " << (dir / (dyn.summary.name + ".csv")).string() << '\n';
      break;
    }
    case ExperimentKind::thermal_pulse_length_scan: finish(thermal_pulse_length_scan(spec), 3); break;
    case ExperimentKind::compare_rabi_stirap: finish(compare_rabi_stirap(spec), 3); break;
    case ExperimentKind::thermometry: {
      const auto t = thermometry(spec);
      finish(t.scan, 3);
      write_text(dir, "thermometry.json", thermometry_json(t, spec.params.trap_frequency, spec.linewidth, hash));
      std::cout << "p0 = " << t.estimate.p0 << " +- " << t.estimate.uncertainty << ", T/T_D = " << t.temperature_ratio
                << '\n';
      break;
    }
  }
  return failures;
}

void report_error(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json j{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STIRAP trapped-ion simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  double tol = 0.0;
  bool check = false;
  auto* run = app.add_subcommand("run", "run an experiment config and/or the invariant suite");
  run->add_option("config", config_path, "YAML run configuration");
  run->add_option("--out", out_dir, "output directory (overrides STIRAP_OUT_DIR and the config)");
  run->add_option("--jobs", jobs, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  run->add_option("--tol", tol, "integrator tolerance in [1e-12, 1e-6]");
  run->add_flag("--check", check, "run the built-in invariant suite");

  bool json = false;
  auto* list = app.add_subcommand("list", "list experiment kinds");
  list->add_flag("--json", json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (list->parsed()) return list_command(json);

  if (config_path.empty() && !check) {
    report_error("config", "run needs a config file or --check", kExitConfig);
    return kExitConfig;
  }
  if (tol != 0.0 && !(tol >= 1e-12 && tol <= 1e-6)) {
    report_error("config", "--tol must lie in [1e-12, 1e-6]", kExitConfig);
    return kExitConfig;
  }

  int status = 0;
  if (!config_path.empty()) {
    RunConfig config;
    try {
      config = load_config(config_path);
      if (jobs > 0) config.spec.jobs = jobs;
      if (tol != 0.0) config.spec.evolve.tol = tol;
      config.spec.validate();
    } catch (const ConfigError& e) {
      report_error("config", e.what(), kExitConfig);
      return kExitConfig;
    }
    fs::path dir = "results";
    if (!config.output_dir.empty()) dir = config.output_dir;
    if (const char* env = std::getenv("STIRAP_OUT_DIR"); env && *env) dir = env;
    if (!out_dir.empty()) dir = out_dir;
    try {
      const std::size_t failures = run_experiment(config, dir);
      if (failures) {
        report_error("numerical", std::to_string(failures) + " sweep points failed; see failures.json",
                     kExitNumerical);
        status = kExitNumerical;
      }
    } catch (const NumericalError& e) {
      report_error("numerical", e.what(), kExitNumerical);
      return kExitNumerical;
    } catch (const ConfigError& e) {
      report_error("config", e.what(), kExitConfig);
      return kExitConfig;
    }
  }
  if (check) {
    const auto results = run_invariant_checks(jobs, tol != 0.0 ? tol : kDefaultTolerance);
    print_check_table(std::cout, results);
    for (const auto& r : results) {
      if (!r.passed && status == 0) status = kExitChecks;
    }
  }
  return status;
}
