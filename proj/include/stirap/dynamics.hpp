#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stirap/fockspace.hpp"
#include "stirap/hamiltonian.hpp"
#include "stirap/pulses.hpp"
#include "stirap/types.hpp"

namespace stirap {

enum class Integrator {
  /// fourth-order commutator-free Magnus with exact exponentials, rotating frame
  magnus4,
  /// embedded Dormand-Prince 5(4), interaction frame
  dormand_prince,
};

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr double kTraceGate = 1e-9;
inline constexpr double kHermiticityGate = 1e-10;
inline constexpr double kPurityGate = 1e-8;
inline constexpr double kEdgePopulationWarning = 1e-3;

struct EvolveOptions {
  /// local error per step, max-norm on the state
  double tol = kDefaultTolerance;
  Integrator integrator = Integrator::magnus4;
  /// 0 picks a schedule-dependent cap (an eighth of the shortest FWHM)
  double max_step = 0.0;
  double initial_step = 0.0;
  std::size_t max_steps = 2'000'000;
  /// keep the full state at every grid point
  bool store_states = false;
};

struct Diagnostics {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double max_purity_drift = 0.0;
  /// largest population seen in the two outermost Fock levels of the basis
  double max_edge_population = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::vector<std::string> warnings;

  bool passes_gates() const {
    return max_trace_error <= kTraceGate && max_hermiticity_error <= kHermiticityGate &&
           max_purity_drift <= kPurityGate;
  }
  /// Worst case over several trajectories; warnings are concatenated.
  void merge(const Diagnostics& other);
};

struct Trajectory {
  std::vector<double> times;
  /// per grid point: population of each electronic level
  std::vector<Eigen::VectorXd> electronic;
  /// per grid point: population of each Fock level n_offset + j
  std::vector<Eigen::VectorXd> fock;
  std::vector<CompositeState> states;
  std::optional<CompositeState> final_state;
  int n_offset = 0;
  Diagnostics diagnostics;
};

/// Integrates d rho/dt = -i [H(t), rho] (or the Schroedinger equation for a
/// pure initial state) over `grid`, whose first point is the initial time.
/// States are reported in the rotating frame.
Trajectory evolve(const CompositeState& initial, const SystemParams& params, const PulseSchedule& schedule,
                  std::span<const double> grid, const EvolveOptions& options = {});

/// Population of `target` summed over motion at the last grid point.
double transfer_efficiency(const Trajectory& trajectory, Level target = Level::three);

/// Population of `target` at grid point i.
double level_population(const Trajectory& trajectory, std::size_t i, Level target = Level::three);

/// Schedule window sampled every t_pulse / 200.
std::vector<double> default_grid(const PulseSchedule& schedule);

/// Start and end of the window only, for sweeps that need the final state.
std::vector<double> endpoint_grid(const PulseSchedule& schedule);

/// Columns: t_us, P_1, [P_2,] P_3, p_n for each Fock level.
void write_csv(std::ostream& out, const Trajectory& trajectory);

/// Final efficiencies and invariant diagnostics as a JSON object.
std::string summary_json(const Trajectory& trajectory);

}  // namespace stirap
