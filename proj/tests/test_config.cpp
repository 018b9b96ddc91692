#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "stirap/config.hpp"
#include "stirap/output.hpp"

using namespace stirap;

TEST_CASE("quantities need units") {
  CHECK(parse_quantity("120 us", Dimension::time) == doctest::Approx(120e-6));
  CHECK(parse_quantity("2 ms", Dimension::time) == doctest::Approx(2e-3));
  CHECK(parse_quantity("2.2 MHz", Dimension::frequency) == doctest::Approx(units::MHz(2.2)));
  CHECK(parse_quantity("1e6 rad_s", Dimension::frequency) == doctest::Approx(1e6));
  CHECK_THROWS_AS(parse_quantity("120", Dimension::time), ConfigError);
  CHECK_THROWS_AS(parse_quantity("120 MHz", Dimension::time), ConfigError);
  CHECK_THROWS_AS(parse_quantity("fast us", Dimension::time), ConfigError);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"(
experiment: delay_scan
schedule:
  t_pulse: 100 us
  transition: blue_sideband
axes:
  t_delay: {start: -20 us, stop: 20 us, points: 5}
solver:
  tol: 1e-9
output_dir: out
seed: 3
)");
  CHECK(c.spec.kind == ExperimentKind::delay_scan);
  CHECK(c.spec.schedule.t_pulse == doctest::Approx(100e-6));
  CHECK(c.spec.schedule.transition == Transition::blue_sideband);
  REQUIRE(c.spec.axes.size() == 1);
  CHECK(c.spec.axes[0].values.size() == 5);
  CHECK(c.spec.axes[0].values[1] == doctest::Approx(-10e-6));
  CHECK(c.spec.evolve.tol == 1e-9);
  CHECK(c.output_dir == "out");
  CHECK(c.seed == 3);
  CHECK(c.hash.size() == 8);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_config("experiment: delay_scan\nbogus: 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment: delay_scan\nschedule:\n  t_puls: 10 us\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment: delay_scan\naxes:\n  t_delay: {start: 1 us, stop: 2 us, count: 3}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("experiment: nothing\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("schedule: {}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment: delay_scan\naxes:\n  t_delay: {start: 1 us, stop: 2 us, points: 3, step: 1 us}\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("experiment: map_2d\nschedule:\n  s_factor: -0.5\n"), ConfigError);
}

TEST_CASE("shipped configs load") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(STIRAP_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()).spec.validate());
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("sweep CSV carries the config hash") {
  CHECK(config_hash("abc") == config_hash("abc"));
  CHECK(config_hash("abc") != config_hash("abd"));
  SweepResult r;
  r.name = "demo";
  r.axes = {{"t_pulse", "us", {1e-5}}};
  r.points.push_back({"s", {1e-5}, 0.5, std::nan(""), "", {}});
  std::ostringstream out;
  write_sweep_csv(out, r, "0badf00d");
  const std::string text = out.str();
  CHECK(text.rfind("# config_hash: 0badf00d", 0) == 0);
  CHECK(text.find("\ns,10,0.5") != std::string::npos);
}
