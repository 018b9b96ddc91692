#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stirap/experiments.hpp"
#include "stirap/lambda_model.hpp"

namespace stirap {

/// CRC-32 of `text` as eight lowercase hex digits.
std::string config_hash(std::string_view text);

/// Axis value in its display unit ("us" -> microseconds, anything else unchanged).
double to_display(double value, const std::string& unit);

/// Long-format CSV: series, axes, efficiency, smoothed, flag, diagnostics.
/// The first line is a "# config_hash: ..." comment.
void write_sweep_csv(std::ostream& out, const SweepResult& result, const std::string& hash);

std::string sweep_metadata_json(const SweepResult& result, const std::string& hash);

void write_adiabaticity_csv(std::ostream& out, const std::vector<AdiabaticityTrace>& traces,
                            const std::vector<double>& delays, const std::string& hash);

/// Long-format time-resolved populations: n, t_us, population of the target level.
void write_fock_dynamics_csv(std::ostream& out, const FockDynamics& dynamics, Level target,
                             const std::string& hash);

std::string thermometry_json(const Thermometry& result, double trap_frequency, double linewidth,
                             const std::string& hash);

/// Minimal gnuplot script plotting `y_column` against `x_column` of `csv_name`.
std::string gnuplot_stub(const std::string& title, const std::string& csv_name, int x_column, int y_column,
                         const std::string& hash);

/// Writes `content` to dir / name and returns the path.
std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content);

}  // namespace stirap
