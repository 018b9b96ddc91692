#pragma once

#include <optional>
#include <string>

#include "stirap/experiments.hpp"

namespace stirap {

/// Validated run configuration. Physical quantities carry unit suffixes in the
/// file ("120 us", "2.2 MHz", "9.2 GHz", "1e6 rad_s") and are SI here.
struct RunConfig {
  SweepSpec spec;
  std::string output_dir;
  std::optional<long> seed;
  /// CRC-32 of the file contents
  std::string hash;
};

enum class Dimension { time, frequency };

/// Parses "<number> <unit>" with unit in {s, ms, us, ns} for time and
/// {Hz, kHz, MHz, GHz, rad_s} for frequency (Hz-type units are cycles/s and
/// come back as rad/s). Throws ConfigError on a missing or mismatched unit.
double parse_quantity(const std::string& text, Dimension dimension);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Default sweep for an experiment kind, matching the published figure it reproduces.
SweepSpec default_spec(ExperimentKind kind);

}  // namespace stirap
