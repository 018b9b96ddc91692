#include <doctest.h>

#include <cmath>

#include "stirap/pulses.hpp"

using namespace stirap;

TEST_CASE("Gaussian envelope") {
  const auto p = GaussianPulse::from_fwhm(2.0, units::us(10), units::us(40));
  CHECK(p.fwhm() == doctest::Approx(units::us(40)));
  CHECK(p.fwhm() / p.width == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0))));
  CHECK(envelope(p, units::us(10)) == doctest::Approx(2.0));
  CHECK(envelope(p, units::us(30)) == doctest::Approx(1.0));
  CHECK(envelope(p, units::us(-10)) == doctest::Approx(1.0));
  CHECK(envelope(p, 1.0) == doctest::Approx(0.0));
  for (double t : {-20e-6, 3e-6, 25e-6}) {
    const double h = 1e-9;
    const double fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
    CHECK(p.derivative(t) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("schedule construction") {
  const auto a = make_stirap_schedule(units::us(120), 0.667, PulseOrder::counter_intuitive, 1.0, 1.0, false);
  CHECK(a.t_delay == doctest::Approx(units::us(80.04)));
  CHECK(a.t_delay > 0.0);
  CHECK(a.stokes.center < a.pump.center);

  const auto b = make_stirap_schedule(units::us(100), 0.0, PulseOrder::counter_intuitive, 1.0, 1.0, false);
  CHECK(b.t_delay == doctest::Approx(0.0));
  CHECK(b.pump.center == doctest::Approx(b.stokes.center));

  const auto c = make_stirap_schedule(units::us(120), 0.5, PulseOrder::intuitive, 1.0, 1.0, false);
  const auto d = make_stirap_schedule(units::us(120), 0.5, PulseOrder::counter_intuitive, 1.0, 1.0, false);
  CHECK(c.t_delay < 0.0);
  for (double t : {-70e-6, -5e-6, 40e-6}) {
    CHECK(c.pump_value(t) == doctest::Approx(d.stokes_value(t)));
    CHECK(c.stokes_value(t) == doctest::Approx(d.pump_value(t)));
  }

  const auto e = make_delay_schedule(units::us(120), units::us(-40), 1.0, 1.0);
  CHECK(e.order == PulseOrder::intuitive);
  CHECK(e.t_delay == doctest::Approx(units::us(-40)));
}

TEST_CASE("effective transfer time") {
  auto tt = [](double t_pulse, double s) {
    return effective_transfer_time(
        make_stirap_schedule(units::us(t_pulse), s, PulseOrder::counter_intuitive, 1.0, 1.0, true));
  };
  CHECK(tt(100, 0.5) == doctest::Approx(units::us(150)));
  CHECK(tt(100, 0.0) == doctest::Approx(units::us(100)));
  CHECK(tt(120, 0.5) == doctest::Approx(units::us(180)));
}

TEST_CASE("truncated schedule edges") {
  const auto s = make_stirap_schedule(units::us(100), 0.5, PulseOrder::counter_intuitive, 3.0, 2.0, true);
  const auto [start, stop] = s.window();
  CHECK(stop - start == doctest::Approx(units::us(150)));
  CHECK(stop == doctest::Approx(s.pump.center));
  CHECK(s.stokes_value(start) == doctest::Approx(2.0));
  CHECK(s.stokes_value(s.stokes.center - units::us(5)) == doctest::Approx(2.0));
  CHECK(s.pump_value(stop - 1e-12) == doctest::Approx(3.0));
  CHECK(s.pump_value(stop + units::us(1)) == 0.0);
  // at the cut the Stokes has fallen by 2^(-4 s^2)
  CHECK(s.stokes_value(stop) / 2.0 == doctest::Approx(std::pow(2.0, -4.0 * 0.25)));
}

TEST_CASE("square schedule") {
  const auto r = make_rabi_schedule(units::us(10), 1.5, 2.5);
  CHECK(r.shape == PulseShape::square);
  CHECK(r.pump_value(units::us(5)) == 1.5);
  CHECK(r.stokes_value(units::us(5)) == 2.5);
  CHECK(r.pump_value(units::us(11)) == 0.0);
}
