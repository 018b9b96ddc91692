#include "stirap/pulses.hpp"

#include <algorithm>
#include <cmath>

namespace stirap {

GaussianPulse GaussianPulse::from_fwhm(double omega_max, double center, double fwhm) {
  if (!(omega_max >= 0.0)) throw std::invalid_argument("GaussianPulse: omega_max must be >= 0");
  if (!(fwhm > 0.0)) throw std::invalid_argument("GaussianPulse: FWHM must be positive");
  return GaussianPulse{omega_max, center, fwhm / kFwhmPerWidth};
}

double GaussianPulse::value(double t) const {
  const double u = (t - center) / width;
  return omega_max * std::exp(-0.5 * u * u);
}

double GaussianPulse::derivative(double t) const {
  return -(t - center) / (width * width) * value(t);
}

double envelope(const GaussianPulse& pulse, double t) { return pulse.value(t); }

std::string to_string(PulseOrder order) {
  return order == PulseOrder::counter_intuitive ? "counter_intuitive" : "intuitive";
}

PulseOrder pulse_order_from_string(const std::string& name) {
  if (name == "counter_intuitive") return PulseOrder::counter_intuitive;
  if (name == "intuitive") return PulseOrder::intuitive;
  throw std::invalid_argument("unknown pulse order '" + name + "'");
}

namespace {

bool in_square(const PulseSchedule& s, double t) { return t >= s.square_start && t <= s.square_end; }

}  // namespace

double PulseSchedule::pump_value(double t) const {
  if (shape == PulseShape::square) return in_square(*this, t) ? pump.omega_max : 0.0;
  if (truncated && t > pump.center) return 0.0;
  return pump.value(t);
}

double PulseSchedule::stokes_value(double t) const {
  if (shape == PulseShape::square) return in_square(*this, t) ? stokes.omega_max : 0.0;
  if (truncated && t < stokes.center) return stokes.omega_max;
  return stokes.value(t);
}

double PulseSchedule::pump_derivative(double t) const {
  if (shape == PulseShape::square) return 0.0;
  if (truncated && t > pump.center) return 0.0;
  return pump.derivative(t);
}

double PulseSchedule::stokes_derivative(double t) const {
  if (shape == PulseShape::square) return 0.0;
  if (truncated && t < stokes.center) return 0.0;
  return stokes.derivative(t);
}

double PulseSchedule::midpoint() const {
  if (shape == PulseShape::square) return 0.5 * (square_start + square_end);
  return 0.5 * (pump.center + stokes.center);
}

std::pair<double, double> PulseSchedule::window() const {
  if (shape == PulseShape::square) return {square_start, square_end};
  if (truncated) return {pump.center - (1.0 + s_factor) * t_pulse, pump.center};
  const double reach = 2.0 * std::max(pump.fwhm(), stokes.fwhm());
  return {std::min(pump.center, stokes.center) - reach, std::max(pump.center, stokes.center) + reach};
}

PulseSchedule make_stirap_schedule(double t_pulse, double s_factor, PulseOrder order,
                                   double omega_p_max, double omega_s_max, bool truncated,
                                   double asymmetry) {
  if (!(t_pulse > 0.0)) throw std::invalid_argument("make_stirap_schedule: t_pulse must be positive");
  if (!(s_factor >= 0.0)) throw std::invalid_argument("make_stirap_schedule: s_factor must be >= 0");
  if (!(asymmetry >= 0.0 && asymmetry < 1.0)) {
    throw std::invalid_argument("make_stirap_schedule: asymmetry must lie in [0, 1)");
  }
  if (truncated && order != PulseOrder::counter_intuitive) {
    throw std::invalid_argument("make_stirap_schedule: truncation requires the counter-intuitive order");
  }
  const double separation = s_factor * t_pulse;
  // mean of the two FWHMs equals t_pulse
  const double stokes_fwhm = t_pulse / (1.0 - 0.5 * asymmetry);
  const double pump_fwhm = (1.0 - asymmetry) * stokes_fwhm;
  const double first = -0.5 * separation;
  const double second = 0.5 * separation;

  PulseSchedule schedule;
  schedule.order = order;
  schedule.truncated = truncated;
  schedule.s_factor = s_factor;
  schedule.t_pulse = t_pulse;
  schedule.asymmetry = asymmetry;
  if (order == PulseOrder::counter_intuitive) {
    schedule.stokes = GaussianPulse::from_fwhm(omega_s_max, first, stokes_fwhm);
    schedule.pump = GaussianPulse::from_fwhm(omega_p_max, second, pump_fwhm);
  } else {
    schedule.pump = GaussianPulse::from_fwhm(omega_p_max, first, pump_fwhm);
    schedule.stokes = GaussianPulse::from_fwhm(omega_s_max, second, stokes_fwhm);
  }
  schedule.t_delay = schedule.pump.center - schedule.stokes.center;
  return schedule;
}

PulseSchedule make_delay_schedule(double t_pulse, double t_delay, double omega_p_max,
                                  double omega_s_max, bool truncated) {
  if (!(t_pulse > 0.0)) throw std::invalid_argument("make_delay_schedule: t_pulse must be positive");
  const PulseOrder order = t_delay >= 0.0 ? PulseOrder::counter_intuitive : PulseOrder::intuitive;
  return make_stirap_schedule(t_pulse, std::abs(t_delay) / t_pulse, order, omega_p_max, omega_s_max,
                              truncated);
}

PulseSchedule make_rabi_schedule(double duration, double omega_p, double omega_s) {
  if (!(duration > 0.0)) throw std::invalid_argument("make_rabi_schedule: duration must be positive");
  if (!(omega_p >= 0.0 && omega_s >= 0.0)) {
    throw std::invalid_argument("make_rabi_schedule: Rabi frequencies must be >= 0");
  }
  PulseSchedule schedule;
  schedule.shape = PulseShape::square;
  schedule.square_start = 0.0;
  schedule.square_end = duration;
  schedule.pump = GaussianPulse{omega_p, 0.5 * duration, duration};
  schedule.stokes = GaussianPulse{omega_s, 0.5 * duration, duration};
  schedule.t_pulse = duration;
  return schedule;
}

double effective_transfer_time(const PulseSchedule& schedule) {
  if (!schedule.truncated) {
    throw std::invalid_argument("effective_transfer_time: defined for truncated schedules only");
  }
  return (1.0 + schedule.s_factor) * schedule.t_pulse;
}

}  // namespace stirap
