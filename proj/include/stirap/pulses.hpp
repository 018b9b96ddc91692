#pragma once

#include <string>
#include <utility>

#include "stirap/types.hpp"

namespace stirap {

/// FWHM / standard-deviation ratio of a Gaussian, 2 sqrt(2 ln 2).
inline const double kFwhmPerWidth = 2.0 * std::sqrt(2.0 * std::log(2.0));

/// Omega(t) = omega_max * exp(-(t - center)^2 / (2 width^2)).
struct GaussianPulse {
  double omega_max = 0.0;
  double center = 0.0;
  double width = 1.0;

  static GaussianPulse from_fwhm(double omega_max, double center, double fwhm);

  double fwhm() const { return kFwhmPerWidth * width; }
  double value(double t) const;
  double derivative(double t) const;
};

double envelope(const GaussianPulse& pulse, double t);

enum class PulseOrder { counter_intuitive, intuitive };

std::string to_string(PulseOrder order);
PulseOrder pulse_order_from_string(const std::string& name);

enum class PulseShape { gaussian, square };

/// Pump and Stokes envelopes of one transfer sequence.
///
/// Sign convention: t_delay = t_pump - t_stokes, so t_delay > 0 is the
/// counter-intuitive order (Stokes first). In truncated mode the Stokes is held
/// at its maximum before its centre and the pump is cut to zero after its
/// centre; the sequence then spans [t_pump - (1 + s) t_pulse, t_pump].
///
/// Square schedules hold both beams constant on [square_start, square_end]
/// and drive Raman Rabi oscillations.
class PulseSchedule {
 public:
  GaussianPulse pump;
  GaussianPulse stokes;
  PulseOrder order = PulseOrder::counter_intuitive;
  bool truncated = false;
  double t_delay = 0.0;
  double s_factor = 0.0;
  double t_pulse = 0.0;
  double asymmetry = 0.0;
  PulseShape shape = PulseShape::gaussian;
  double square_start = 0.0;
  double square_end = 0.0;

  double pump_value(double t) const;
  double stokes_value(double t) const;
  double pump_derivative(double t) const;
  double stokes_derivative(double t) const;

  double omega_p_max() const { return pump.omega_max; }
  double omega_s_max() const { return stokes.omega_max; }

  double midpoint() const;
  /// Integration window. Gaussian: [min centre - 2 t_pulse, max centre + 2 t_pulse];
  /// truncated: [t_pump - (1 + s) t_pulse, t_pump]; square: the drive interval.
  std::pair<double, double> window() const;
};

/// Gaussian pair with centres placed symmetrically about t = 0 and separated by
/// s_factor * t_pulse. `asymmetry` shortens the pump FWHM to (1 - a) times the
/// Stokes FWHM while keeping their mean equal to t_pulse.
PulseSchedule make_stirap_schedule(double t_pulse, double s_factor, PulseOrder order,
                                   double omega_p_max, double omega_s_max, bool truncated,
                                   double asymmetry = 0.0);

/// Same as make_stirap_schedule but parametrized by the signed delay
/// (positive = counter-intuitive).
PulseSchedule make_delay_schedule(double t_pulse, double t_delay, double omega_p_max,
                                  double omega_s_max, bool truncated = false);

/// Constant-amplitude drive of both beams on [0, duration].
PulseSchedule make_rabi_schedule(double duration, double omega_p, double omega_s);

/// (1 + s) t_pulse for a truncated schedule.
double effective_transfer_time(const PulseSchedule& schedule);

}  // namespace stirap
