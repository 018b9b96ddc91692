#include "stirap/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "stirap/output.hpp"

namespace stirap {

double parse_quantity(const std::string& text, Dimension dimension) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse quantity '" + text + "'");
  }
  std::string unit = text.substr(used);
  unit.erase(0, unit.find_first_not_of(" \t"));
  unit.erase(unit.find_last_not_of(" \t") + 1);
  if (unit.empty()) throw ConfigError("quantity '" + text + "' needs a unit suffix");
  if (!std::isfinite(value)) throw ConfigError("quantity '" + text + "' is not finite");
  if (dimension == Dimension::time) {
    if (unit == "s") return units::s(value);
    if (unit == "ms") return units::ms(value);
    if (unit == "us") return units::us(value);
    if (unit == "ns") return units::ns(value);
  } else {
    if (unit == "Hz") return units::Hz(value);
    if (unit == "kHz") return units::kHz(value);
    if (unit == "MHz") return units::MHz(value);
    if (unit == "GHz") return units::GHz(value);
    if (unit == "rad_s") return value;
  }
  throw ConfigError("quantity '" + text + "': unit '" + unit + "' is not a " +
                    (dimension == Dimension::time ? "time" : "frequency") + " unit");
}

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError("'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

double quantity(const YAML::Node& node, const std::string& key, Dimension dimension) {
  if (!node.IsScalar()) throw ConfigError("key '" + key + "' must be a quantity with unit");
  return parse_quantity(node.Scalar(), dimension);
}

Level level_from(const YAML::Node& node, const std::string& key) {
  const int v = scalar<int>(node, key);
  if (v == 1) return Level::one;
  if (v == 2) return Level::two;
  if (v == 3) return Level::three;
  throw ConfigError("key '" + key + "' must be 1, 2 or 3");
}

// Axis units: time axes carry quantities, others are dimensionless.
bool is_time_axis(const std::string& name) {
  return name == "t_delay" || name == "t_pulse" || name == "t_rabi";
}

Axis parse_axis(const std::string& name, const YAML::Node& node) {
  static const std::set<std::string> known{"t_delay", "t_pulse", "t_rabi", "s_factor", "n"};
  if (!known.count(name)) throw ConfigError("unknown axis '" + name + "'");
  check_keys(node, "axes." + name, {"start", "stop", "points", "step", "values"});
  Axis axis{name, is_time_axis(name) ? "us" : "", {}};
  auto read = [&](const YAML::Node& v, const std::string& key) {
    return is_time_axis(name) ? quantity(v, key, Dimension::time) : scalar<double>(v, key);
  };
  if (node["values"]) {
    if (node["start"] || node["stop"] || node["points"] || node["step"]) {
      throw ConfigError("axes." + name + ": give either values or start/stop");
    }
    if (!node["values"].IsSequence()) throw ConfigError("axes." + name + ".values must be a list");
    for (const auto& v : node["values"]) axis.values.push_back(read(v, "axes." + name + ".values"));
    return axis;
  }
  if (!node["start"] || !node["stop"]) throw ConfigError("axes." + name + " needs start and stop");
  const double start = read(node["start"], "axes." + name + ".start");
  const double stop = read(node["stop"], "axes." + name + ".stop");
  if (node["points"] && node["step"]) throw ConfigError("axes." + name + ": give either points or step");
  std::size_t points = 0;
  if (node["points"]) {
    const int p = scalar<int>(node["points"], "points");
    if (p < 1) throw ConfigError("axes." + name + ".points must be >= 1");
    points = static_cast<std::size_t>(p);
  } else if (node["step"]) {
    const double step = read(node["step"], "axes." + name + ".step");
    if (!(step > 0.0)) throw ConfigError("axes." + name + ".step must be positive");
    points = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  } else {
    throw ConfigError("axes." + name + " needs points or step");
  }
  if (points == 1) {
    axis.values = {start};
  } else {
    if (!(stop > start)) throw ConfigError("axes." + name + ": stop must exceed start");
    const double step = node["step"] ? read(node["step"], "step") : (stop - start) / double(points - 1);
    for (std::size_t i = 0; i < points; ++i) axis.values.push_back(start + step * double(i));
  }
  return axis;
}

void parse_system(const YAML::Node& node, SweepSpec& spec) {
  check_keys(node, "system", {"delta", "trap_frequency", "eta", "n_max", "electronic_levels",
                              "target_effective_rabi", "detuning_ratio"});
  auto& p = spec.params;
  if (node["delta"]) p.delta = quantity(node["delta"], "system.delta", Dimension::frequency);
  if (node["trap_frequency"]) {
    p.trap_frequency = quantity(node["trap_frequency"], "system.trap_frequency", Dimension::frequency);
  }
  if (node["eta"]) p.eta = scalar<double>(node["eta"], "system.eta");
  if (node["n_max"]) p.n_max = scalar<int>(node["n_max"], "system.n_max");
  if (node["electronic_levels"]) p.electronic_levels = scalar<int>(node["electronic_levels"], "system.electronic_levels");
  if (node["target_effective_rabi"]) {
    p.target_effective_rabi =
        quantity(node["target_effective_rabi"], "system.target_effective_rabi", Dimension::frequency);
  }
  if (node["detuning_ratio"]) spec.detuning_ratio = scalar<double>(node["detuning_ratio"], "system.detuning_ratio");
}

void parse_schedule(const YAML::Node& node, SweepSpec& spec) {
  check_keys(node, "schedule", {"t_pulse", "s_factor", "order", "truncated", "asymmetry", "transition"});
  auto& s = spec.schedule;
  if (node["t_pulse"]) s.t_pulse = quantity(node["t_pulse"], "schedule.t_pulse", Dimension::time);
  if (node["s_factor"]) s.s_factor = scalar<double>(node["s_factor"], "schedule.s_factor");
  try {
    if (node["order"]) s.order = pulse_order_from_string(scalar<std::string>(node["order"], "schedule.order"));
    if (node["transition"]) {
      s.transition = transition_from_string(scalar<std::string>(node["transition"], "schedule.transition"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (node["truncated"]) s.truncated = scalar<bool>(node["truncated"], "schedule.truncated");
  if (node["asymmetry"]) s.asymmetry = scalar<double>(node["asymmetry"], "schedule.asymmetry");
}

void parse_initial(const YAML::Node& node, SweepSpec& spec) {
  check_keys(node, "initial", {"motion", "n", "mean_n", "max_tail", "level", "target"});
  auto& i = spec.initial;
  if (node["motion"]) {
    const auto m = scalar<std::string>(node["motion"], "initial.motion");
    if (m == "fock") {
      i.motion = InitialSpec::Motion::fock;
    } else if (m == "thermal") {
      i.motion = InitialSpec::Motion::thermal;
    } else {
      throw ConfigError("initial.motion must be 'fock' or 'thermal'");
    }
  }
  if (node["n"]) i.n = scalar<int>(node["n"], "initial.n");
  if (node["mean_n"]) i.mean_n = scalar<double>(node["mean_n"], "initial.mean_n");
  if (node["max_tail"]) i.max_tail = scalar<double>(node["max_tail"], "initial.max_tail");
  if (node["level"]) i.level = level_from(node["level"], "initial.level");
  if (node["target"]) i.target = level_from(node["target"], "initial.target");
}

void parse_solver(const YAML::Node& node, SweepSpec& spec) {
  check_keys(node, "solver", {"tol", "integrator", "max_step", "motional_window", "jobs"});
  auto& e = spec.evolve;
  if (node["tol"]) e.tol = scalar<double>(node["tol"], "solver.tol");
  if (node["integrator"]) {
    try {
      e.integrator = integrator_from_string(scalar<std::string>(node["integrator"], "solver.integrator"));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what());
    }
  }
  if (node["max_step"]) e.max_step = quantity(node["max_step"], "solver.max_step", Dimension::time);
  if (node["motional_window"]) spec.motional_window = scalar<int>(node["motional_window"], "solver.motional_window");
  if (node["jobs"]) spec.jobs = scalar<int>(node["jobs"], "solver.jobs");
}

void parse_thermometry(const YAML::Node& node, SweepSpec& spec) {
  check_keys(node, "thermometry", {"window_start", "window_stop", "linewidth"});
  if (node["window_start"]) spec.p0_window_start = quantity(node["window_start"], "thermometry.window_start", Dimension::time);
  if (node["window_stop"]) spec.p0_window_stop = quantity(node["window_stop"], "thermometry.window_stop", Dimension::time);
  if (node["linewidth"]) spec.linewidth = quantity(node["linewidth"], "thermometry.linewidth", Dimension::frequency);
}

}  // namespace

SweepSpec default_spec(ExperimentKind kind) {
  SweepSpec spec;
  spec.kind = kind;
  auto range = [](double start, double stop, double step) {
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) v.push_back(start + step * double(i));
    return v;
  };
  const double us = units::us(1);
  switch (kind) {
    case ExperimentKind::adiabaticity:
      spec.schedule.t_pulse = units::us(100);
      spec.axes = {{"t_delay", "us", {30 * us, 80 * us, 130 * us}}};
      break;
    case ExperimentKind::delay_scan:
      spec.schedule.t_pulse = units::us(120);
      spec.axes = {{"t_delay", "us", range(-150 * us, 150 * us, 5 * us)}};
      break;
    case ExperimentKind::map_2d:
      spec.axes = {{"t_pulse", "us", range(5 * us, 200 * us, 5 * us)}, {"s_factor", "", range(0.05, 1.0, 0.05)}};
      break;
    case ExperimentKind::fock_dynamics:
      spec.schedule.t_pulse = units::us(50);
      spec.schedule.s_factor = 0.7;
      spec.axes = {{"n", "", range(0, 14, 1)}};
      break;
    case ExperimentKind::thermal_pulse_length_scan:
      spec.schedule.s_factor = 0.5;
      spec.schedule.truncated = true;
      spec.schedule.transition = Transition::blue_sideband;
      spec.initial.motion = InitialSpec::Motion::thermal;
      spec.axes = {{"t_pulse", "us", range(10 * us, 200 * us, 10 * us)}};
      break;
    case ExperimentKind::compare_rabi_stirap:
      spec.schedule.s_factor = 0.5;
      spec.schedule.truncated = true;
      spec.schedule.transition = Transition::blue_sideband;
      spec.initial.motion = InitialSpec::Motion::thermal;
      spec.axes = {{"t_pulse", "us", range(10 * us, 150 * us, 10 * us)},
                   {"t_rabi", "us", range(0.5 * us, 60 * us, 0.5 * us)}};
      break;
    case ExperimentKind::thermometry:
      spec.schedule.s_factor = 0.5;
      spec.schedule.truncated = true;
      spec.schedule.transition = Transition::blue_sideband;
      spec.initial.motion = InitialSpec::Motion::thermal;
      spec.axes = {{"t_pulse", "us", range(100 * us, 160 * us, 5 * us)}};
      break;
  }
  return spec;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  check_keys(root, "config", {"experiment", "system", "schedule", "initial", "axes", "solver", "smoothing_window",
                              "ratio_threshold", "thermometry", "output_dir", "seed"});
  if (!root["experiment"]) throw ConfigError("config needs an 'experiment' key");
  RunConfig config;
  config.spec = default_spec(experiment_kind_from_string(scalar<std::string>(root["experiment"], "experiment")));
  SweepSpec& spec = config.spec;
  if (root["system"]) parse_system(root["system"], spec);
  if (root["schedule"]) parse_schedule(root["schedule"], spec);
  if (root["initial"]) parse_initial(root["initial"], spec);
  if (root["solver"]) parse_solver(root["solver"], spec);
  if (root["thermometry"]) parse_thermometry(root["thermometry"], spec);
  if (root["smoothing_window"]) spec.smoothing_window = scalar<int>(root["smoothing_window"], "smoothing_window");
  if (root["ratio_threshold"]) spec.ratio_threshold = scalar<double>(root["ratio_threshold"], "ratio_threshold");
  if (root["axes"]) {
    if (!root["axes"].IsMap()) throw ConfigError("'axes' must be a mapping");
    for (const auto& kv : root["axes"]) {
      const auto name = kv.first.as<std::string>();
      Axis axis = parse_axis(name, kv.second);
      bool replaced = false;
      for (auto& existing : spec.axes) {
        if (existing.name == name) {
          existing = axis;
          replaced = true;
        }
      }
      if (!replaced) spec.axes.push_back(std::move(axis));
    }
  }
  if (root["output_dir"]) config.output_dir = scalar<std::string>(root["output_dir"], "output_dir");
  if (root["seed"] && !root["seed"].IsNull()) config.seed = scalar<long>(root["seed"], "seed");
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  config.hash = config_hash(text);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace stirap
