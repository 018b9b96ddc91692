#include "stirap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace stirap {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::adiabaticity: return "adiabaticity";
    case ExperimentKind::delay_scan: return "delay_scan";
    case ExperimentKind::map_2d: return "map_2d";
    case ExperimentKind::fock_dynamics: return "fock_dynamics";
    case ExperimentKind::thermal_pulse_length_scan: return "thermal_pulse_length_scan";
    case ExperimentKind::compare_rabi_stirap: return "compare_rabi_stirap";
    case ExperimentKind::thermometry: return "thermometry";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto kind : {ExperimentKind::adiabaticity, ExperimentKind::delay_scan, ExperimentKind::map_2d,
                    ExperimentKind::fock_dynamics, ExperimentKind::thermal_pulse_length_scan,
                    ExperimentKind::compare_rabi_stirap, ExperimentKind::thermometry}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

namespace {

const Axis* find_axis(const SweepSpec& spec, const std::string& name) {
  for (const auto& axis : spec.axes) {
    if (axis.name == name) return &axis;
  }
  return nullptr;
}

const Axis& require_axis(const SweepSpec& spec, const std::string& name) {
  const Axis* axis = find_axis(spec, name);
  if (!axis) throw ConfigError(to_string(spec.kind) + " needs a '" + name + "' axis");
  return *axis;
}

void require_positive(const Axis& axis) {
  for (double v : axis.values) {
    if (!(v > 0.0)) throw ConfigError("axis '" + axis.name + "' must hold positive values");
  }
}

void absorb(PointDiagnostics& out, const Diagnostics& d) {
  out.trace_error = std::max(out.trace_error, d.max_trace_error);
  out.hermiticity_error = std::max(out.hermiticity_error, d.max_hermiticity_error);
  out.purity_drift = std::max(out.purity_drift, d.max_purity_drift);
  out.edge_population = std::max(out.edge_population, d.max_edge_population);
  out.warnings.insert(out.warnings.end(), d.warnings.begin(), d.warnings.end());
}

void absorb(PointDiagnostics& out, const PointDiagnostics& d) {
  out.trace_error = std::max(out.trace_error, d.trace_error);
  out.hermiticity_error = std::max(out.hermiticity_error, d.hermiticity_error);
  out.purity_drift = std::max(out.purity_drift, d.purity_drift);
  out.edge_population = std::max(out.edge_population, d.edge_population);
  out.truncation_tail = std::max(out.truncation_tail, d.truncation_tail);
  if (d.failed && !out.failed) {
    out.failed = true;
    out.error = d.error;
  }
  out.warnings.insert(out.warnings.end(), d.warnings.begin(), d.warnings.end());
}

/// Result of one Fock-state run inside a sweep task.
struct FockTask {
  double efficiency = 0.0;
  std::vector<double> series;  // target population on a time grid, when requested
  PointDiagnostics diagnostics;
};

FockTask run_task(const SystemParams& params, const PulseSchedule& schedule, int n, const InitialSpec& initial,
                  std::span<const double> grid, const EvolveOptions& options, int window) {
  FockTask task;
  try {
    const Trajectory traj = evolve_fock(params, schedule, n, initial.level, grid, options, window);
    task.efficiency = transfer_efficiency(traj, initial.target);
    if (grid.size() > 2) {
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        task.series.push_back(level_population(traj, i, initial.target));
      }
    }
    absorb(task.diagnostics, traj.diagnostics);
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "n = " << n << ": " << e.what();
    task.diagnostics.failed = true;
    task.diagnostics.error = msg.str();
    task.efficiency = std::numeric_limits<double>::quiet_NaN();
  }
  return task;
}

/// Thermal weights sum_n p_n e_n / sum_n p_n over a block of finished tasks.
double mix(const MotionalDistribution& motion, const std::vector<FockTask>& tasks, std::size_t first,
           PointDiagnostics& diag) {
  double sum = 0.0;
  for (int n = 0; n < motion.n_max(); ++n) {
    const FockTask& task = tasks[first + static_cast<std::size_t>(n)];
    absorb(diag, task.diagnostics);
    sum += motion[n] * task.efficiency;
  }
  diag.truncation_tail = motion.tail();
  return diag.failed ? std::numeric_limits<double>::quiet_NaN() : sum / motion.total();
}

std::vector<double> mix_series(const MotionalDistribution& motion, const std::vector<FockTask>& tasks,
                               std::size_t first, std::size_t length) {
  std::vector<double> out(length, 0.0);
  for (int n = 0; n < motion.n_max(); ++n) {
    const FockTask& task = tasks[first + static_cast<std::size_t>(n)];
    if (task.series.size() != length) {
      std::fill(out.begin(), out.end(), std::numeric_limits<double>::quiet_NaN());
      return out;
    }
    for (std::size_t i = 0; i < length; ++i) out[i] += motion[n] * task.series[i];
  }
  for (double& v : out) v /= motion.total();
  return out;
}

PulseSchedule stirap_schedule(const SweepSpec& spec, const SystemParams& params, double t_pulse, double s_factor,
                              bool truncated) {
  const double omega = beam_rabi_frequency(params);
  return make_stirap_schedule(t_pulse, s_factor, spec.schedule.order, omega, omega, truncated,
                              spec.schedule.asymmetry);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

SweepResult start_result(const SweepSpec& spec, const std::string& name, const SystemParams& params) {
  SweepResult result;
  result.name = name;
  result.metadata["kind"] = to_string(spec.kind);
  result.metadata["code_version"] = STIRAP_VERSION;
  result.metadata["electronic_levels"] = std::to_string(params.electronic_levels);
  result.metadata["delta_rad_s"] = format(params.delta);
  result.metadata["trap_frequency_rad_s"] = format(params.trap_frequency);
  result.metadata["eta"] = format(params.eta);
  result.metadata["target_effective_rabi_rad_s"] = format(params.target_effective_rabi);
  result.metadata["beam_rabi_rad_s"] = format(beam_rabi_frequency(params));
  result.metadata["integrator"] = to_string(spec.evolve.integrator);
  result.metadata["tol"] = format(spec.evolve.tol);
  result.metadata["motional_window"] = std::to_string(spec.motional_window);
  if (params.electronic_levels == 3) {
    result.metadata["detuning_ratio"] = format(spec.detuning_ratio);
    result.metadata["elimination_agreement_bound"] = spec.detuning_ratio >= 200.0 ? "2e-3" : "1e-2";
  }
  if (spec.initial.motion == InitialSpec::Motion::thermal) {
    result.metadata["mean_n"] = format(spec.initial.mean_n);
    result.metadata["mean_n_source"] = "inferred from p0 = 0.08 via p0 = 1/(nbar + 1)";
  }
  return result;
}

}  // namespace

void SweepSpec::validate() const {
  for (const auto& axis : axes) {
    if (axis.values.empty()) throw ConfigError("axis '" + axis.name + "' is empty");
    for (std::size_t i = 1; i < axis.values.size(); ++i) {
      if (!(axis.values[i] > axis.values[i - 1])) {
        throw ConfigError("axis '" + axis.name + "' must be strictly increasing");
      }
    }
  }
  if (!(schedule.t_pulse > 0.0)) throw ConfigError("t_pulse must be positive");
  if (!(schedule.s_factor >= 0.0)) throw ConfigError("s_factor must be >= 0 (the order sets the sign)");
  if (!(schedule.asymmetry >= 0.0 && schedule.asymmetry < 1.0)) throw ConfigError("asymmetry must lie in [0, 1)");
  if (schedule.truncated && schedule.order != PulseOrder::counter_intuitive) {
    throw ConfigError("truncated schedules require the counter-intuitive order");
  }
  if (smoothing_window < 1) throw ConfigError("smoothing_window must be >= 1");
  if (motional_window < 0) throw ConfigError("motional_window must be >= 0");
  if (initial.n < 0) throw ConfigError("initial Fock index must be >= 0");
  if (initial.motion == InitialSpec::Motion::thermal && !(initial.mean_n >= 0.0)) {
    throw ConfigError("mean_n must be >= 0");
  }
  if (!(initial.max_tail > 0.0 && initial.max_tail < 1.0)) throw ConfigError("max_tail must lie in (0, 1)");
  if (initial.level == initial.target) throw ConfigError("initial and target levels coincide");
  if (motional_window == 0 && initial.motion == InitialSpec::Motion::fock && initial.n >= params.n_max) {
    throw ConfigError("initial Fock index outside the n_max basis");
  }
  if (!(ratio_threshold > 0.0)) throw ConfigError("ratio_threshold must be positive");
  if (!(p0_window_stop > p0_window_start)) throw ConfigError("p0 window must be increasing");
  if (!(linewidth > 0.0)) throw ConfigError("linewidth must be positive");
  if (!(evolve.tol >= 1e-12 && evolve.tol <= 1e-6)) throw ConfigError("tol must lie in [1e-12, 1e-6]");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  model_params(*this).validate();
}

std::vector<const SweepPoint*> SweepResult::series(const std::string& label) const {
  std::vector<const SweepPoint*> out;
  for (const auto& p : points) {
    if (p.series == label) out.push_back(&p);
  }
  return out;
}

std::vector<double> SweepResult::efficiencies(const std::string& label) const {
  std::vector<double> out;
  for (const auto* p : series(label)) out.push_back(p->efficiency);
  return out;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return p.diagnostics.failed; }));
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SystemParams model_params(const SweepSpec& spec) {
  SystemParams p = with_transition(spec.params, spec.schedule.transition);
  if (p.electronic_levels == 3) p = rescaled_full_model(p, spec.detuning_ratio);
  return p;
}

Trajectory evolve_fock(const SystemParams& params, const PulseSchedule& schedule, int n, Level level,
                       std::span<const double> grid, const EvolveOptions& options, int window) {
  if (n < 0) throw std::invalid_argument("evolve_fock: negative Fock index");
  SystemParams local = params;
  if (window > 0) {
    local.n_offset = std::max(0, n - window);
    local.n_max = n + window + 1 - local.n_offset;
  } else {
    if (n >= params.n_max) throw std::invalid_argument("evolve_fock: Fock index outside the basis");
    local.n_offset = 0;
  }
  const auto initial = CompositeState::basis(local.electronic_levels, local.n_max, level, n - local.n_offset);
  return evolve(initial, local, schedule, grid, options);
}

MotionalDistribution initial_distribution(const InitialSpec& initial) {
  if (initial.motion == InitialSpec::Motion::fock) return make_fock(initial.n, initial.n + 1);
  return make_thermal(initial.mean_n, thermal_truncation(initial.mean_n, initial.max_tail));
}

EnsembleResult ensemble_efficiency(const SystemParams& params, const PulseSchedule& schedule,
                                   const MotionalDistribution& motion, const InitialSpec& initial,
                                   const EvolveOptions& options, int window) {
  const auto grid = endpoint_grid(schedule);
  std::vector<FockTask> tasks;
  EnsembleResult result;
  for (int n = 0; n < motion.n_max(); ++n) {
    if (motion[n] == 0.0) {
      tasks.push_back(FockTask{});
    } else {
      tasks.push_back(run_task(params, schedule, n, initial, grid, options, window));
    }
    result.per_fock.push_back(tasks.back().efficiency);
  }
  result.efficiency = mix(motion, tasks, 0, result.diagnostics);
  result.diagnostics.warnings.insert(result.diagnostics.warnings.end(), motion.warnings().begin(),
                                     motion.warnings().end());
  return result;
}

std::vector<double> moving_average(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const std::ptrdiff_t half = (window - 1) / 2;
  std::vector<double> out(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + (window - 1 - half));
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += values[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

AdiabaticityTrace adiabaticity(const SweepSpec& spec, double t_delay) {
  const SystemParams params = with_transition(spec.params, spec.schedule.transition);
  const double omega = beam_rabi_frequency(params);
  const PulseSchedule schedule = make_delay_schedule(spec.schedule.t_pulse, t_delay, omega, omega);
  const auto [start, stop] = schedule.window();
  const auto grid = uniform_grid(start, stop, 4001);
  return adiabaticity_trace(schedule, params.delta, grid, spec.ratio_threshold);
}

std::vector<AdiabaticityTrace> adiabaticity_scan(const SweepSpec& spec) {
  spec.validate();
  const Axis& delays = require_axis(spec, "t_delay");
  std::vector<AdiabaticityTrace> traces;
  for (double d : delays.values) traces.push_back(adiabaticity(spec, d));
  return traces;
}

SweepResult delay_scan(const SweepSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const Axis& delays = require_axis(spec, "t_delay");
  const SystemParams params = model_params(spec);
  const MotionalDistribution motion = initial_distribution(spec.initial);
  const std::size_t per_point = static_cast<std::size_t>(motion.n_max());
  const std::size_t count = delays.values.size();

  std::vector<FockTask> tasks(count * per_point);
  parallel_for(tasks.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t i = k / per_point;
    const int n = static_cast<int>(k % per_point);
    if (motion[n] == 0.0) return;
    const double omega = beam_rabi_frequency(params);
    const PulseSchedule schedule =
        make_delay_schedule(spec.schedule.t_pulse, delays.values[i], omega, omega, spec.schedule.truncated);
    tasks[k] = run_task(params, schedule, n, spec.initial, endpoint_grid(schedule), spec.evolve,
                        spec.motional_window);
  });

  SweepResult result = start_result(spec, "fig3a", params);
  result.axes = {delays};
  result.metadata["t_pulse_us"] = format(units::to_us(spec.schedule.t_pulse));
  result.metadata["smoothing_window"] = std::to_string(spec.smoothing_window);
  std::vector<double> raw;
  for (std::size_t i = 0; i < count; ++i) {
    SweepPoint point;
    point.series = "efficiency";
    point.coords = {delays.values[i]};
    point.efficiency = mix(motion, tasks, i * per_point, point.diagnostics);
    point.flag = to_string(classify_regime(std::abs(delays.values[i]) / spec.schedule.t_pulse));
    raw.push_back(point.efficiency);
    result.points.push_back(std::move(point));
  }
  const auto smooth = moving_average(raw, spec.smoothing_window);
  for (std::size_t i = 0; i < count; ++i) result.points[i].smoothed = smooth[i];
  result.wall_time_s = seconds_since(start);
  return result;
}

SweepResult map_2d(const SweepSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const Axis& pulses = require_axis(spec, "t_pulse");
  const Axis& scales = require_axis(spec, "s_factor");
  require_positive(pulses);
  const SystemParams params = model_params(spec);
  const MotionalDistribution motion = initial_distribution(spec.initial);
  const std::size_t per_point = static_cast<std::size_t>(motion.n_max());
  const std::size_t count = pulses.values.size() * scales.values.size();

  std::vector<FockTask> tasks(count * per_point);
  parallel_for(tasks.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t i = k / per_point;
    const int n = static_cast<int>(k % per_point);
    if (motion[n] == 0.0) return;
    const double t_pulse = pulses.values[i / scales.values.size()];
    const double s = scales.values[i % scales.values.size()];
    const PulseSchedule schedule = stirap_schedule(spec, params, t_pulse, s, spec.schedule.truncated);
    tasks[k] = run_task(params, schedule, n, spec.initial, endpoint_grid(schedule), spec.evolve,
                        spec.motional_window);
  });

  SweepResult result = start_result(spec, spec.schedule.transition == Transition::carrier ? "fig4" : "fig5", params);
  result.axes = {pulses, scales};
  result.metadata["transition"] = to_string(spec.schedule.transition);
  for (std::size_t i = 0; i < count; ++i) {
    SweepPoint point;
    point.series = to_string(spec.schedule.transition);
    const double s = scales.values[i % scales.values.size()];
    point.coords = {pulses.values[i / scales.values.size()], s};
    point.efficiency = mix(motion, tasks, i * per_point, point.diagnostics);
    point.flag = to_string(classify_regime(s));
    result.points.push_back(std::move(point));
  }
  result.wall_time_s = seconds_since(start);
  return result;
}

FockDynamics fock_dynamics(const SweepSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const Axis& levels = require_axis(spec, "n");
  const SystemParams params = model_params(spec);
  const PulseSchedule schedule =
      stirap_schedule(spec, params, spec.schedule.t_pulse, spec.schedule.s_factor, spec.schedule.truncated);
  const auto grid = default_grid(schedule);

  FockDynamics out;
  for (double v : levels.values) {
    if (v < 0.0 || v != std::floor(v)) throw ConfigError("axis 'n' must hold non-negative integers");
    out.n.push_back(static_cast<int>(v));
  }
  out.trajectories.resize(out.n.size());
  std::vector<PointDiagnostics> diags(out.n.size());
  parallel_for(out.n.size(), spec.jobs, [&](std::size_t i) {
    try {
      out.trajectories[i] =
          evolve_fock(params, schedule, out.n[i], spec.initial.level, grid, spec.evolve, spec.motional_window);
      absorb(diags[i], out.trajectories[i].diagnostics);
    } catch (const NumericalError& e) {
      diags[i].failed = true;
      diags[i].error = e.what();
    }
  });

  const char* name = spec.schedule.transition == Transition::carrier ? "fig6a" : "fig6b";
  out.summary = start_result(spec, name, params);
  out.summary.axes = {levels};
  out.summary.metadata["transition"] = to_string(spec.schedule.transition);
  out.summary.metadata["t_pulse_us"] = format(units::to_us(spec.schedule.t_pulse));
  out.summary.metadata["s_factor"] = format(spec.schedule.s_factor);
  for (std::size_t i = 0; i < out.n.size(); ++i) {
    SweepPoint point;
    point.series = "n=" + std::to_string(out.n[i]);
    point.coords = {static_cast<double>(out.n[i])};
    point.diagnostics = diags[i];
    point.efficiency = diags[i].failed ? std::numeric_limits<double>::quiet_NaN()
                                       : transfer_efficiency(out.trajectories[i], spec.initial.target);
    if (spec.schedule.transition == Transition::red_sideband && out.n[i] == 0) {
      point.flag = "no_resonant_coupling";
    }
    out.summary.points.push_back(std::move(point));
  }
  out.summary.wall_time_s = seconds_since(start);
  return out;
}

SweepResult thermal_pulse_length_scan(const SweepSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const Axis& pulses = require_axis(spec, "t_pulse");
  require_positive(pulses);
  InitialSpec thermal = spec.initial;
  thermal.motion = InitialSpec::Motion::thermal;
  const MotionalDistribution motion = initial_distribution(thermal);
  const auto per_point = static_cast<std::size_t>(motion.n_max());
  const std::size_t count = pulses.values.size();

  SweepSpec bsb_spec = spec;
  bsb_spec.schedule.transition = Transition::blue_sideband;
  SweepSpec rsb_spec = spec;
  rsb_spec.schedule.transition = Transition::red_sideband;
  const SystemParams bsb = model_params(bsb_spec);
  const SystemParams rsb = model_params(rsb_spec);

  // task layout: [pulse][transition][n]
  std::vector<FockTask> tasks(count * 2 * per_point);
  parallel_for(tasks.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t i = k / (2 * per_point);
    const bool red = (k / per_point) % 2 == 1;
    const int n = static_cast<int>(k % per_point);
    const SystemParams& params = red ? rsb : bsb;
    const PulseSchedule schedule =
        stirap_schedule(spec, params, pulses.values[i], spec.schedule.s_factor, spec.schedule.truncated);
    tasks[k] = run_task(params, schedule, n, spec.initial, endpoint_grid(schedule), spec.evolve,
                        spec.motional_window);
  });

  SweepResult result = start_result(spec, "comp_thermal", bsb);
  result.axes = {pulses};
  result.metadata["mean_n"] = format(thermal.mean_n);
  result.metadata["mean_n_source"] = "inferred from p0 = 0.08 via p0 = 1/(nbar + 1)";
  result.metadata["s_factor"] = format(spec.schedule.s_factor);
  result.metadata["truncated"] = spec.schedule.truncated ? "true" : "false";
  result.metadata["thermal_n_max"] = std::to_string(motion.n_max());
  result.metadata["thermal_tail"] = format(motion.tail());
  const MotionalDistribution ground = make_fock(0, 1);
  for (const char* label : {"bsb_ground", "bsb_thermal", "rsb_thermal"}) {
    const std::string series = label;
    for (std::size_t i = 0; i < count; ++i) {
      SweepPoint point;
      point.series = series;
      point.coords = {pulses.values[i]};
      const std::size_t bsb_first = i * 2 * per_point;
      if (series == "bsb_ground") {
        point.efficiency = mix(ground, tasks, bsb_first, point.diagnostics);
      } else if (series == "bsb_thermal") {
        point.efficiency = mix(motion, tasks, bsb_first, point.diagnostics);
      } else {
        point.efficiency = mix(motion, tasks, bsb_first + per_point, point.diagnostics);
      }
      result.points.push_back(std::move(point));
    }
  }
  result.wall_time_s = seconds_since(start);
  return result;
}

SweepResult compare_rabi_stirap(const SweepSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const Axis& pulses = require_axis(spec, "t_pulse");
  const Axis& rabi_times = require_axis(spec, "t_rabi");
  require_positive(pulses);
  require_positive(rabi_times);
  const SystemParams params = model_params(spec);
  InitialSpec thermal = spec.initial;
  thermal.motion = InitialSpec::Motion::thermal;
  const MotionalDistribution motion = initial_distribution(thermal);
  const auto per_point = static_cast<std::size_t>(motion.n_max());
  const std::size_t count = pulses.values.size();

  const double omega = beam_rabi_frequency(params);
  const PulseSchedule rabi = make_rabi_schedule(rabi_times.values.back(), omega, omega);
  std::vector<double> rabi_grid{0.0};
  rabi_grid.insert(rabi_grid.end(), rabi_times.values.begin(), rabi_times.values.end());

  // tasks: [stirap pulse][n] followed by [rabi n]
  std::vector<FockTask> tasks((count + 1) * per_point);
  parallel_for(tasks.size(), spec.jobs, [&](std::size_t k) {
    const std::size_t i = k / per_point;
    const int n = static_cast<int>(k % per_point);
    if (i == count) {
      tasks[k] = run_task(params, rabi, n, spec.initial, rabi_grid, spec.evolve, spec.motional_window);
      return;
    }
    const PulseSchedule schedule =
        stirap_schedule(spec, params, pulses.values[i], spec.schedule.s_factor, spec.schedule.truncated);
    tasks[k] = run_task(params, schedule, n, spec.initial, endpoint_grid(schedule), spec.evolve,
                        spec.motional_window);
  });

  SweepResult result = start_result(spec, spec.schedule.transition == Transition::carrier ? "fig7b" : "fig7a", params);
  result.axes = {pulses, rabi_times};
  result.metadata["transition"] = to_string(spec.schedule.transition);
  result.metadata["s_factor"] = format(spec.schedule.s_factor);
  result.metadata["truncated"] = spec.schedule.truncated ? "true" : "false";
  result.metadata["thermal_n_max"] = std::to_string(motion.n_max());
  result.metadata["thermal_tail"] = format(motion.tail());

  PointDiagnostics rabi_diag;
  mix(motion, tasks, count * per_point, rabi_diag);
  const auto rabi_curve = mix_series(motion, tasks, count * per_point, rabi_grid.size());
  for (std::size_t j = 0; j < rabi_times.values.size(); ++j) {
    SweepPoint point;
    point.series = "rabi";
    point.coords = {rabi_times.values[j]};
    point.efficiency = rabi_diag.failed ? std::numeric_limits<double>::quiet_NaN() : rabi_curve[j + 1];
    point.diagnostics = rabi_diag;
    result.points.push_back(std::move(point));
  }
  for (std::size_t i = 0; i < count; ++i) {
    SweepPoint point;
    point.series = "stirap";
    const double t_pulse = pulses.values[i];
    const double t_trans = spec.schedule.truncated ? (1.0 + spec.schedule.s_factor) * t_pulse
                                                   : t_pulse * (4.0 + spec.schedule.s_factor);
    point.coords = {t_trans};
    point.efficiency = mix(motion, tasks, i * per_point, point.diagnostics);
    result.points.push_back(std::move(point));
  }
  result.wall_time_s = seconds_since(start);
  return result;
}

P0Estimate extract_p0(const std::vector<double>& pulse_lengths, const std::vector<double>& rsb,
                      const std::vector<double>& bsb, double window_start, double window_stop) {
  if (pulse_lengths.size() != rsb.size() || pulse_lengths.size() != bsb.size()) {
    throw std::invalid_argument("extract_p0: curves must share the pulse-length axis");
  }
  std::vector<double> r;
  std::vector<double> b;
  for (std::size_t i = 0; i < pulse_lengths.size(); ++i) {
    const double t = pulse_lengths[i];
    if (t >= window_start * (1.0 - 1e-12) && t <= window_stop * (1.0 + 1e-12)) {
      r.push_back(rsb[i]);
      b.push_back(bsb[i]);
    }
  }
  if (r.size() < 3) throw std::invalid_argument("extract_p0: window holds fewer than 3 points");
  auto mean_and_error = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (n - 1.0);
    return std::pair{mean, std::sqrt(var / n)};
  };
  const auto [mr, er] = mean_and_error(r);
  const auto [mb, eb] = mean_and_error(b);
  return P0Estimate{mb - mr, std::hypot(er, eb), r.size()};
}

P0Estimate extract_p0(const SweepResult& rsb_curve, const SweepResult& bsb_curve, double window_start,
                      double window_stop) {
  auto unpack = [](const SweepResult& curve, std::vector<double>& t, std::vector<double>& e) {
    for (const auto& p : curve.points) {
      if (p.coords.empty()) throw std::invalid_argument("extract_p0: point without a pulse length");
      t.push_back(p.coords.front());
      e.push_back(p.efficiency);
    }
  };
  std::vector<double> tr, er, tb, eb;
  unpack(rsb_curve, tr, er);
  unpack(bsb_curve, tb, eb);
  if (tr != tb) throw std::invalid_argument("extract_p0: curves must share the pulse-length axis");
  return extract_p0(tr, er, eb, window_start, window_stop);
}

double temperature_from_p0(double p0, double trap_frequency, double linewidth) {
  if (!(p0 > 0.0)) throw std::invalid_argument("temperature_from_p0: p0 = 0 means infinite temperature");
  if (!(p0 <= 1.0)) throw std::invalid_argument("temperature_from_p0: p0 must not exceed 1");
  if (!(trap_frequency > 0.0 && linewidth > 0.0)) {
    throw std::invalid_argument("temperature_from_p0: frequencies must be positive");
  }
  if (p0 == 1.0) return 0.0;
  const double mean_n = 1.0 / p0 - 1.0;
  const double temperature = trap_frequency / std::log1p(1.0 / mean_n);
  return temperature / (0.5 * linewidth);
}

Thermometry thermometry(const SweepSpec& spec) {
  Thermometry out;
  out.scan = thermal_pulse_length_scan(spec);
  out.scan.name = "thermometry";
  SweepResult rsb = out.scan;
  SweepResult bsb = out.scan;
  std::erase_if(rsb.points, [](const SweepPoint& p) { return p.series != "rsb_thermal"; });
  std::erase_if(bsb.points, [](const SweepPoint& p) { return p.series != "bsb_thermal"; });
  out.estimate = extract_p0(rsb, bsb, spec.p0_window_start, spec.p0_window_stop);
  out.expected_p0 = 1.0 / (spec.initial.mean_n + 1.0);
  out.temperature_ratio = temperature_from_p0(out.estimate.p0, spec.params.trap_frequency, spec.linewidth);
  return out;
}

}  // namespace stirap
