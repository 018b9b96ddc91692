#include "stirap/lambda_model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace stirap {

double mixing_angle(double omega_p, double omega_s) {
  if (omega_p == 0.0 && omega_s == 0.0) {
    throw std::invalid_argument("mixing_angle: undefined when both Rabi frequencies vanish");
  }
  return std::atan2(omega_p, omega_s);
}

DressedStates dressed_states(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return DressedStates{Eigen::Vector3d(c, 0.0, -s), Eigen::Vector3d(0.0, 1.0, 0.0),
                       Eigen::Vector3d(s, 0.0, c)};
}

AdiabaticityTrace adiabaticity_trace(const PulseSchedule& schedule, double delta,
                                     std::span<const double> grid, double ratio_threshold) {
  if (grid.size() < 2) throw std::invalid_argument("adiabaticity_trace: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("adiabaticity_trace: grid must be strictly increasing");
    }
  }
  if (!(ratio_threshold > 0.0)) throw std::invalid_argument("adiabaticity_trace: threshold must be positive");

  AdiabaticityTrace trace;
  trace.ratio_threshold = ratio_threshold;
  trace.delta = delta;
  trace.omega_p_max = schedule.omega_p_max();
  trace.omega_s_max = schedule.omega_s_max();
  const double peak = std::max(schedule.omega_p_max(), schedule.omega_s_max());
  const double floor2 = 1e-24 * peak * peak;

  const std::size_t n = grid.size();
  trace.times.assign(grid.begin(), grid.end());
  trace.coupling.resize(n);
  trace.splitting.resize(n);
  trace.violated.assign(n, false);
  trace.flagged.assign(n, false);

  bool any_defined = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    const double wp = schedule.pump_value(t);
    const double ws = schedule.stokes_value(t);
    const double sum2 = wp * wp + ws * ws;
    const auto freqs = eigenfrequencies(wp, ws, delta);
    trace.splitting[i] = std::abs(freqs.minus - freqs.zero);
    if (!(sum2 > floor2)) {
      // mixing angle held at its last defined value: no rotation, no coupling
      trace.flagged[i] = true;
      trace.coupling[i] = 0.0;
      continue;
    }
    any_defined = true;
    const double dwp = schedule.pump_derivative(t);
    const double dws = schedule.stokes_derivative(t);
    trace.coupling[i] = std::abs((dwp * ws - wp * dws) / sum2);
  }
  if (!any_defined) {
    throw std::invalid_argument("adiabaticity_trace: both envelopes vanish on the whole grid");
  }

  bool open = false;
  double start = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool bad = !trace.flagged[i] && trace.splitting[i] < ratio_threshold * trace.coupling[i];
    trace.violated[i] = bad;
    if (trace.coupling[i] > 0.0) {
      trace.margin_ratio = std::min(trace.margin_ratio, trace.splitting[i] / trace.coupling[i]);
    }
    if (bad && !open) {
      open = true;
      start = grid[i];
    } else if (!bad && open) {
      open = false;
      trace.violation_intervals.emplace_back(start, grid[i - 1]);
    }
  }
  if (open) trace.violation_intervals.emplace_back(start, grid[n - 1]);
  return trace;
}

std::vector<double> uniform_grid(double start, double stop, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least two points");
  if (!(stop > start)) throw std::invalid_argument("uniform_grid: stop must exceed start");
  std::vector<double> grid(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = start + step * static_cast<double>(i);
  grid.back() = stop;
  return grid;
}

Regime classify_regime(double s_factor) {
  if (!(s_factor >= 0.0)) throw std::invalid_argument("classify_regime: s must be >= 0");
  return s_factor >= 0.6 ? Regime::adiabatic : Regime::rabi_oscillation;
}

std::string to_string(Regime regime) {
  return regime == Regime::adiabatic ? "adiabatic" : "rabi_oscillation";
}

void write_csv(std::ostream& out, const AdiabaticityTrace& trace) {
  out << "t_us,coupling_rad_s,splitting_rad_s,violated\n";
  const auto precision = out.precision(10);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << units::to_us(trace.times[i]) << ',' << trace.coupling[i] << ',' << trace.splitting[i] << ','
        << (trace.violated[i] ? 1 : 0) << '\n';
  }
  out.precision(precision);
}

}  // namespace stirap
