#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "stirap/pulses.hpp"
#include "stirap/types.hpp"

namespace stirap {

/// Rotating-wave Hamiltonian of the three-level Lambda system (hbar = 1):
///   H = 1/2 [[-2 dp, Wp, 0], [Wp, 0, Ws], [0, Ws, -2 ds]].
template <typename Scalar>
Matrix3c<Scalar> lambda_hamiltonian(Scalar omega_p, Scalar omega_s, Scalar detuning_p,
                                    Scalar detuning_s) {
  Matrix3c<Scalar> h = Matrix3c<Scalar>::Zero();
  h(0, 0) = -detuning_p;
  h(2, 2) = -detuning_s;
  h(0, 1) = h(1, 0) = Scalar(0.5) * omega_p;
  h(1, 2) = h(2, 1) = Scalar(0.5) * omega_s;
  return h;
}

template <typename Scalar>
struct Eigenfrequencies {
  Scalar zero;
  Scalar plus;
  Scalar minus;
};

/// Dressed eigenfrequencies at two-photon resonance, measured from the bare
/// energy of |1> and |3>:
///   w0 = 0, w+- = (delta +- sqrt(delta^2 + Wp^2 + Ws^2)) / 2.
/// The root that nearly cancels is evaluated in its rationalized form.
template <typename Scalar>
Eigenfrequencies<Scalar> eigenfrequencies(Scalar omega_p, Scalar omega_s, Scalar delta) {
  using std::sqrt;
  const Scalar coupling2 = omega_p * omega_p + omega_s * omega_s;
  const Scalar root = sqrt(delta * delta + coupling2);
  Scalar plus;
  Scalar minus;
  if (delta >= Scalar(0)) {
    plus = Scalar(0.5) * (delta + root);
    minus = root + delta > Scalar(0) ? -Scalar(0.5) * coupling2 / (delta + root) : Scalar(0);
  } else {
    minus = Scalar(0.5) * (delta - root);
    plus = root - delta > Scalar(0) ? Scalar(0.5) * coupling2 / (root - delta) : Scalar(0);
  }
  return {Scalar(0), plus, minus};
}

/// Theta with tan(Theta) = Wp / Ws, in [0, pi/2] for non-negative inputs.
double mixing_angle(double omega_p, double omega_s);

/// Large-detuning dressed states in the bare basis (|1>, |2>, |3>).
struct DressedStates {
  Eigen::Vector3d dark;    // cos(Theta)|1> - sin(Theta)|3>
  Eigen::Vector3d plus;    // |2>
  Eigen::Vector3d minus;   // sin(Theta)|1> + cos(Theta)|3>
};

DressedStates dressed_states(double theta);

/// Both sides of the time-dependent adiabatic criterion along a schedule:
/// the non-adiabatic coupling |dTheta/dt| and the dressed splitting |w- - w0|.
struct AdiabaticityTrace {
  std::vector<double> times;
  std::vector<double> coupling;
  std::vector<double> splitting;
  std::vector<bool> violated;
  /// Points where both envelopes vanish; the mixing angle is undefined there.
  std::vector<bool> flagged;
  std::vector<std::pair<double, double>> violation_intervals;
  /// min over the grid of splitting / coupling (infinity if coupling is zero everywhere)
  double margin_ratio = std::numeric_limits<double>::infinity();
  double ratio_threshold = 10.0;
  double delta = 0.0;
  double omega_p_max = 0.0;
  double omega_s_max = 0.0;
};

/// A grid point violates adiabaticity when splitting < ratio_threshold * coupling.
/// The coupling uses analytic envelope derivatives.
AdiabaticityTrace adiabaticity_trace(const PulseSchedule& schedule, double delta,
                                     std::span<const double> grid, double ratio_threshold = 10.0);

/// Uniform grid over the schedule window with `points` samples.
std::vector<double> uniform_grid(double start, double stop, std::size_t points);

enum class Regime { rabi_oscillation, adiabatic };

/// Threshold s = 0.6; the boundary is classified adiabatic.
Regime classify_regime(double s_factor);
std::string to_string(Regime regime);

/// CSV columns: t_us, coupling_rad_s, splitting_rad_s, violated.
void write_csv(std::ostream& out, const AdiabaticityTrace& trace);

}  // namespace stirap
