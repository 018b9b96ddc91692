#pragma once

#include <functional>
#include <limits>
#include <span>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stirap/dynamics.hpp"
#include "stirap/fockspace.hpp"
#include "stirap/hamiltonian.hpp"
#include "stirap/lambda_model.hpp"
#include "stirap/pulses.hpp"

namespace stirap {

enum class ExperimentKind {
  adiabaticity,
  delay_scan,
  map_2d,
  fock_dynamics,
  thermal_pulse_length_scan,
  compare_rabi_stirap,
  thermometry,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct Axis {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

struct InitialSpec {
  enum class Motion { fock, thermal };
  Motion motion = Motion::fock;
  int n = 0;
  double mean_n = 11.5;
  /// thermal truncation: tail of the Bose distribution left out
  double max_tail = kThermalTailWarning;
  Level level = Level::one;
  Level target = Level::three;
};

struct ScheduleTemplate {
  double t_pulse = units::us(120);
  double s_factor = 0.7;
  PulseOrder order = PulseOrder::counter_intuitive;
  bool truncated = false;
  double asymmetry = 0.0;
  Transition transition = Transition::carrier;
};

struct SweepSpec {
  ExperimentKind kind = ExperimentKind::delay_scan;
  std::vector<Axis> axes;
  SystemParams params;
  ScheduleTemplate schedule;
  InitialSpec initial;
  /// moving-average window in grid points
  int smoothing_window = 5;
  /// Fock states kept on each side of the initial n; 0 evolves the full n_max basis
  int motional_window = 4;
  /// Delta / W_max used when params.electronic_levels = 3
  double detuning_ratio = 200.0;
  EvolveOptions evolve;
  /// worker threads; 0 uses every available core
  int jobs = 0;
  /// adiabaticity: threshold on splitting / coupling
  double ratio_threshold = 10.0;
  /// thermometry: plateau window and the constants for the temperature
  double p0_window_start = units::us(120);
  double p0_window_stop = units::us(150);
  double linewidth = units::MHz(41.3);

  void validate() const;
};

struct PointDiagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double purity_drift = 0.0;
  double edge_population = 0.0;
  double truncation_tail = 0.0;
  bool failed = false;
  std::string error;
  std::vector<std::string> warnings;
};

struct SweepPoint {
  std::string series;
  std::vector<double> coords;
  double efficiency = 0.0;
  /// moving average along the sweep axis (delay scans), NaN otherwise
  double smoothed = std::numeric_limits<double>::quiet_NaN();
  std::string flag;
  PointDiagnostics diagnostics;
};

struct SweepResult {
  std::string name;
  std::vector<Axis> axes;
  std::vector<SweepPoint> points;
  std::map<std::string, std::string> metadata;
  double wall_time_s = 0.0;

  std::vector<const SweepPoint*> series(const std::string& label) const;
  std::vector<double> efficiencies(const std::string& label) const;
  std::size_t failures() const;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index is
/// processed exactly once; callers write results by index.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

/// Model parameters for a sweep: applies the transition, and the detuning
/// rescale for the three-level model.
SystemParams model_params(const SweepSpec& spec);

/// Evolves |level, n> with a motional basis of n +- window (clipped at 0).
Trajectory evolve_fock(const SystemParams& params, const PulseSchedule& schedule, int n, Level level,
                       std::span<const double> grid, const EvolveOptions& options, int window);

struct EnsembleResult {
  double efficiency = 0.0;
  std::vector<double> per_fock;
  PointDiagnostics diagnostics;
};

/// Efficiency of a diagonal motional distribution as sum_n p_n e_n / sum_n p_n.
EnsembleResult ensemble_efficiency(const SystemParams& params, const PulseSchedule& schedule,
                                   const MotionalDistribution& motion, const InitialSpec& initial,
                                   const EvolveOptions& options, int window);

/// Motional distribution of an initial-state spec (single Fock state or thermal).
MotionalDistribution initial_distribution(const InitialSpec& initial);

/// Centred moving average; the window shrinks at the ends.
std::vector<double> moving_average(const std::vector<double>& values, int window);

AdiabaticityTrace adiabaticity(const SweepSpec& spec, double t_delay);
/// One trace per value of the t_delay axis.
std::vector<AdiabaticityTrace> adiabaticity_scan(const SweepSpec& spec);
SweepResult delay_scan(const SweepSpec& spec);
SweepResult map_2d(const SweepSpec& spec);

struct FockDynamics {
  std::vector<int> n;
  std::vector<Trajectory> trajectories;
  SweepResult summary;
};
FockDynamics fock_dynamics(const SweepSpec& spec);

SweepResult thermal_pulse_length_scan(const SweepSpec& spec);
SweepResult compare_rabi_stirap(const SweepSpec& spec);

struct P0Estimate {
  double p0 = 0.0;
  double uncertainty = 0.0;
  std::size_t points = 0;
};

/// Mean(BSB) - mean(RSB) over the window of the pulse-length axis; uncertainty
/// combines the two windowed standard errors in quadrature.
P0Estimate extract_p0(const std::vector<double>& pulse_lengths, const std::vector<double>& rsb,
                      const std::vector<double>& bsb, double window_start, double window_stop);
P0Estimate extract_p0(const SweepResult& rsb_curve, const SweepResult& bsb_curve, double window_start,
                      double window_stop);

/// T / T_Doppler for a thermal state with ground-state population p0:
/// nbar = 1/p0 - 1, T = w / ln(1 + 1/nbar), T_D = Gamma / 2 (hbar = k_B = 1).
double temperature_from_p0(double p0, double trap_frequency, double linewidth);

struct Thermometry {
  SweepResult scan;
  P0Estimate estimate;
  double temperature_ratio = 0.0;
  double expected_p0 = 0.0;
};
Thermometry thermometry(const SweepSpec& spec);

}  // namespace stirap
