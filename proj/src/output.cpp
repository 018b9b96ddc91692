#include "stirap/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

namespace stirap {

std::string config_hash(std::string_view text) {
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  char buffer[9];
  std::snprintf(buffer, sizeof buffer, "%08x", crc.checksum());
  return buffer;
}

double to_display(double value, const std::string& unit) { return unit == "us" ? units::to_us(value) : value; }

namespace {

// Fixed formatting so identical results give identical bytes.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", v);
  return buffer;
}

std::string column_name(const Axis& axis) {
  return axis.unit.empty() ? axis.name : axis.name + "_" + axis.unit;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result, const std::string& hash) {
  out << "# config_hash: " << hash << '\n';
  out << "series";
  std::size_t columns = 0;
  for (const auto& p : result.points) columns = std::max(columns, p.coords.size());
  for (std::size_t a = 0; a < columns; ++a) {
    // compare_rabi_stirap keeps one coordinate per point; its axis is named by the series
    out << ',' << (columns == result.axes.size() ? column_name(result.axes[a]) : "t_us");
  }
  out << ",efficiency,smoothed,flag,trace_error,hermiticity_error,purity_drift,edge_population,"
         "truncation_tail,failed\n";
  for (const auto& p : result.points) {
    out << p.series;
    for (std::size_t a = 0; a < columns; ++a) {
      const std::string unit =
          columns == result.axes.size() ? result.axes[a].unit : std::string("us");
      out << ',' << (a < p.coords.size() ? num(to_display(p.coords[a], unit)) : "");
    }
    const auto& d = p.diagnostics;
    out << ',' << num(p.efficiency) << ',' << num(p.smoothed) << ',' << p.flag << ',' << num(d.trace_error)
        << ',' << num(d.hermiticity_error) << ',' << num(d.purity_drift) << ',' << num(d.edge_population) << ','
        << num(d.truncation_tail) << ',' << (d.failed ? 1 : 0) << '\n';
  }
}

std::string sweep_metadata_json(const SweepResult& result, const std::string& hash) {
  nlohmann::ordered_json j;
  j["name"] = result.name;
  j["config_hash"] = hash;
  j["metadata"] = result.metadata;
  j["wall_time_s"] = result.wall_time_s;
  j["points"] = result.points.size();
  j["failures"] = result.failures();
  nlohmann::ordered_json axes = nlohmann::ordered_json::array();
  for (const auto& axis : result.axes) {
    axes.push_back({{"name", axis.name}, {"unit", axis.unit}, {"count", axis.values.size()}});
  }
  j["axes"] = axes;
  std::vector<std::string> warnings;
  for (const auto& p : result.points) {
    for (const auto& w : p.diagnostics.warnings) {
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

void write_adiabaticity_csv(std::ostream& out, const std::vector<AdiabaticityTrace>& traces,
                            const std::vector<double>& delays, const std::string& hash) {
  out << "# config_hash: " << hash << '\n';
  out << "t_delay_us,t_us,coupling_rad_s,splitting_rad_s,violated\n";
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& trace = traces[k];
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      out << num(units::to_us(delays[k])) << ',' << num(units::to_us(trace.times[i])) << ','
          << num(trace.coupling[i]) << ',' << num(trace.splitting[i]) << ',' << (trace.violated[i] ? 1 : 0)
          << '\n';
    }
  }
}

void write_fock_dynamics_csv(std::ostream& out, const FockDynamics& dynamics, Level target,
                             const std::string& hash) {
  out << "# config_hash: " << hash << '\n';
  out << "n,t_us,population\n";
  for (std::size_t k = 0; k < dynamics.trajectories.size(); ++k) {
    const auto& traj = dynamics.trajectories[k];
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      out << dynamics.n[k] << ',' << num(units::to_us(traj.times[i])) << ','
          << num(level_population(traj, i, target)) << '\n';
    }
  }
}

std::string thermometry_json(const Thermometry& result, double trap_frequency, double linewidth,
                             const std::string& hash) {
  nlohmann::ordered_json j;
  j["config_hash"] = hash;
  j["p0"] = result.estimate.p0;
  j["p0_uncertainty"] = result.estimate.uncertainty;
  j["window_points"] = result.estimate.points;
  j["expected_p0"] = result.expected_p0;
  j["temperature_over_doppler"] = result.temperature_ratio;
  j["trap_frequency_rad_s"] = trap_frequency;
  j["linewidth_rad_s"] = linewidth;
  j["scan_metadata"] = result.scan.metadata;
  return j.dump(2) + "\n";
}

std::string gnuplot_stub(const std::string& title, const std::string& csv_name, int x_column, int y_column,
                         const std::string& hash) {
  std::ostringstream out;
  out << "# config_hash: " << hash << '\n'
      << "set datafile separator ','\n"
      << "set title '" << title << "'\n"
      << "set ylabel 'transfer efficiency'\n"
      << "set key autotitle columnhead\n"
      << "plot '" << csv_name << "' every ::2 using " << x_column << ':' << y_column << " with linespoints\n";
  return out.str();
}

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << content;
  return path;
}

}  // namespace stirap
