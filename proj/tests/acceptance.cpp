// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "stirap/config.hpp"
#include "stirap/experiments.hpp"
#include "stirap/lambda_model.hpp"

using namespace stirap;

namespace {

// Pinned tolerances.
constexpr double kEigenRelTol = 1e-10;
constexpr double kOverlapFactor = 5.0;
constexpr double kPlateau = 0.95;
constexpr double kSymmetry = 1e-3;
constexpr double kDelayScanSeconds = 300.0;
constexpr double kMapSeconds = 1800.0;
constexpr double kOscillation = 0.01;
constexpr double kMonotoneSlack = 0.02;
constexpr double kBsbFockFloor = 0.9;
constexpr double kLaguerreZeroCeiling = 0.1;
constexpr double kThermalGap = 0.03;
constexpr double kP0 = 0.08;
constexpr double kP0Tol = 0.01;
constexpr double kTemperature = 1.3;
constexpr double kTemperatureTol = 0.2;
constexpr double kBsbRabi = 0.8;
constexpr double kCarrierRabi = 0.5;
constexpr double kRabiTol = 0.1;
constexpr double kBsbStirap = 0.95;
constexpr double kCarrierStirap = 0.7;
constexpr double kHalvingTol = 1e-6;
constexpr double kFullVsEff50 = 1e-2;
constexpr double kFullVsEff200 = 2e-3;

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Diagnostics of every sweep point, for the hygiene criterion.
struct Hygiene {
  double trace = 0.0, herm = 0.0, purity = 0.0;
  std::size_t points = 0, failed = 0;
  void add(const SweepResult& r) {
    for (const auto& p : r.points) {
      trace = std::max(trace, p.diagnostics.trace_error);
      herm = std::max(herm, p.diagnostics.hermiticity_error);
      purity = std::max(purity, p.diagnostics.purity_drift);
      failed += p.diagnostics.failed;
      ++points;
    }
  }
  void add(const Diagnostics& d) {
    trace = std::max(trace, d.max_trace_error);
    herm = std::max(herm, d.max_hermiticity_error);
    purity = std::max(purity, d.max_purity_drift);
    ++points;
  }
};

Hygiene hygiene;

const SweepPoint* find(const SweepResult& r, const std::string& series, std::vector<double> coords) {
  for (const auto& p : r.points) {
    if (p.series != series || p.coords.size() != coords.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < coords.size(); ++i) same &= std::abs(p.coords[i] - coords[i]) <= 1e-9 * (1.0 + std::abs(coords[i]));
    if (same) return &p;
  }
  return nullptr;
}

Line eigen_system() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0.05, 1.0), ratio(10.0, 500.0);
  double worst_eig = 0.0, worst_overlap = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double wp = amp(rng) * units::MHz(1), ws = amp(rng) * units::MHz(1);
    const double w = std::hypot(wp, ws);
    const double delta = ratio(rng) * w;
    Eigen::Matrix3cd h = lambda_hamiltonian(wp, ws, delta, delta);
    h += delta * Eigen::Matrix3cd::Identity();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h);
    const auto f = eigenfrequencies(wp, ws, delta);
    Eigen::Vector3d expected(f.minus, f.zero, f.plus);
    std::sort(expected.data(), expected.data() + 3);
    const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
    worst_eig = std::max(worst_eig, (solver.eigenvalues() - expected).cwiseAbs().maxCoeff() / scale);
    const auto d = dressed_states(mixing_angle(wp, ws));
    for (const Eigen::Vector3d& v : {d.dark, d.plus, d.minus}) {
      double best = 0.0;
      for (int j = 0; j < 3; ++j) best = std::max(best, std::norm(solver.eigenvectors().col(j).dot(v.cast<cplx>())));
      worst_overlap = std::max(worst_overlap, (1.0 - best) / ((w / delta) * (w / delta)));
    }
  }
  const double t = seconds_since(start);
  return {1, "eigen-system fidelity", worst_eig <= kEigenRelTol && worst_overlap <= kOverlapFactor && t < 1.0,
          fmt("max rel eigenvalue error %.2e, max overlap error %.2f (W/Delta)^2, %.3f s", worst_eig, worst_overlap, t)};
}

Line adiabaticity_traces() {
  const auto start = std::chrono::steady_clock::now();
  SweepSpec spec = default_spec(ExperimentKind::adiabaticity);
  spec.ratio_threshold = 10.0;
  auto touches = [](const AdiabaticityTrace& tr, double lo, double hi) {
    for (const auto& [a, b] : tr.violation_intervals) {
      if (b >= lo && a <= hi) return true;
    }
    return false;
  };
  auto centres = [&](double delay) {
    const double omega = beam_rabi_frequency(spec.params);
    const auto s = make_delay_schedule(spec.schedule.t_pulse, delay, omega, omega);
    return std::pair{std::min(s.pump.center, s.stokes.center), std::max(s.pump.center, s.stokes.center)};
  };
  const auto a = adiabaticity(spec, units::us(30));
  const auto b = adiabaticity(spec, units::us(80));
  const auto c = adiabaticity(spec, units::us(130));
  const auto [a_lo, a_hi] = centres(units::us(30));
  const bool edges = touches(a, a.times.front(), a_lo) && touches(a, a_hi, a.times.back());
  const auto [b_lo, b_hi] = centres(units::us(80));
  const bool clean = !touches(b, b_lo, b_hi);
  const auto [c_lo, c_hi] = centres(units::us(130));
  const bool middle = touches(c, c_lo, c_hi);
  const double t = seconds_since(start);
  return {2, "adiabaticity traces", edges && clean && middle && t < 1.0,
          fmt("30 us edges %s, 80 us overlap clean %s, 130 us between peaks %s, %.3f s", edges ? "yes" : "no",
              clean ? "yes" : "no", middle ? "yes" : "no", t)};
}

Line delay_scan_line(SweepResult& keep) {
  SweepSpec spec = default_spec(ExperimentKind::delay_scan);
  const auto start = std::chrono::steady_clock::now();
  keep = delay_scan(spec);
  const double t = seconds_since(start);
  hygiene.add(keep);
  double plateau_min = 1.0, asym = 0.0;
  for (const auto& p : keep.points) {
    const double d = units::to_us(p.coords[0]);
    if (std::abs(d) >= 50.0 - 1e-9 && std::abs(d) <= 110.0 + 1e-9) plateau_min = std::min(plateau_min, p.efficiency);
    if (const SweepPoint* mirror = find(keep, p.series, {-p.coords[0]})) {
      asym = std::max(asym, std::abs(p.efficiency - mirror->efficiency));
    }
  }
  return {3, "delay scan", plateau_min >= kPlateau && asym <= kSymmetry && t < kDelayScanSeconds,
          fmt("plateau min %.4f over |t_delay| in [50, 110] us, max sign asymmetry %.2e, %.1f s", plateau_min, asym, t)};
}

// First t_pulse on the s row from which the efficiency stays >= threshold.
// Shortest pulse reaching the threshold anywhere in the adiabatic regime.
double first_reach(const SweepResult& r, double threshold) {
  double first = std::numeric_limits<double>::infinity();
  for (const auto& p : r.points) {
    if (classify_regime(p.coords[1]) == Regime::adiabatic && p.efficiency >= threshold) {
      first = std::min(first, p.coords[0]);
    }
  }
  return first;
}

double row_max(const SweepResult& r, double s) {
  double best = 0.0;
  for (const auto& p : r.points) {
    if (std::abs(p.coords[1] - s) < 1e-9) best = std::max(best, p.efficiency);
  }
  return best;
}

Line regime_maps() {
  const auto start = std::chrono::steady_clock::now();
  SweepSpec spec = default_spec(ExperimentKind::map_2d);
  spec.schedule.transition = Transition::carrier;
  const SweepResult carrier = map_2d(spec);
  spec.schedule.transition = Transition::blue_sideband;
  const SweepResult bsb = map_2d(spec);
  const double t = seconds_since(start);
  hygiene.add(carrier);
  hygiene.add(bsb);

  double s07 = 0.0, best = 1.0;
  for (double s : spec.axes[1].values) {
    if (std::abs(s - 0.7) < std::abs(s07 - 0.7)) s07 = s;
  }
  double worst_07 = 1.0;
  for (const auto& p : carrier.points) {
    if (std::abs(p.coords[1] - s07) < 1e-9 && p.coords[0] >= units::us(50) - 1e-12) {
      worst_07 = std::min(worst_07, p.efficiency);
    }
  }
  bool oscillatory = true;
  for (double s : spec.axes[1].values) {
    if (s > 0.3 + 1e-9) continue;
    std::vector<std::pair<double, double>> row;
    for (const auto& p : carrier.points) {
      if (std::abs(p.coords[1] - s) < 1e-9) row.push_back({p.coords[0], p.efficiency});
    }
    std::sort(row.begin(), row.end());
    double peak = 0.0, drop = 0.0;
    for (const auto& [tp, e] : row) {
      peak = std::max(peak, e);
      drop = std::max(drop, peak - e);
    }
    best = std::min(best, drop);
    oscillatory &= drop > kOscillation;
  }
  const double t_car = first_reach(carrier, kPlateau);
  const double t_bsb = first_reach(bsb, kPlateau);
  const bool later = std::isfinite(t_bsb) && t_bsb > t_car;
  return {4, "regime maps",
          worst_07 >= kPlateau && oscillatory && later && t <= kMapSeconds,
          fmt("carrier min %.4f at s = 0.7, t_pulse >= 50 us; smallest drop for s <= 0.3: %.3f; "
              "first reach of 0.95 for s >= 0.6: carrier %.0f us, bsb %.0f us (bsb max at s = 0.7: %.3f); "
              "two 40x20 maps %.0f s",
              worst_07, best, units::to_us(t_car), units::to_us(t_bsb), row_max(bsb, s07), t)};
}

// Efficiencies indexed by the n axis (one series per Fock state).
std::vector<double> per_fock(const SweepResult& r) {
  std::vector<double> e;
  for (const auto& p : r.points) e.push_back(p.efficiency);
  return e;
}

Line fock_resolved() {
  SweepSpec spec = default_spec(ExperimentKind::fock_dynamics);
  spec.schedule.transition = Transition::carrier;
  spec.axes = {{"n", "", {}}};
  for (int n = 0; n <= 17; ++n) spec.axes[0].values.push_back(n);
  const auto carrier = fock_dynamics(spec);
  hygiene.add(carrier.summary);
  const auto e_car = per_fock(carrier.summary);
  double worst_rise = 0.0;
  for (int n = 0; n < 10; ++n) worst_rise = std::max(worst_rise, e_car[n + 1] - e_car[n]);

  const double x = spec.params.eta * spec.params.eta;
  int zero = 0;
  for (int n = 1; n <= 30; ++n) {
    if (std::abs(laguerre(n, 0, x)) < std::abs(laguerre(zero, 0, x))) zero = n;
  }
  const double at_zero = zero < static_cast<int>(e_car.size()) ? e_car[zero] : std::nan("");

  SweepSpec side = spec;
  side.schedule.transition = Transition::blue_sideband;
  side.schedule.s_factor = 0.4;
  side.schedule.t_pulse = units::us(200);
  side.axes = {{"n", "", {}}};
  for (int n = 0; n <= 14; ++n) side.axes[0].values.push_back(n);
  const auto bsb = fock_dynamics(side);
  hygiene.add(bsb.summary);
  const auto e_bsb = per_fock(bsb.summary);
  const double bsb_min = *std::min_element(e_bsb.begin(), e_bsb.end());
  const bool ok = worst_rise <= kMonotoneSlack && bsb_min >= kBsbFockFloor && std::abs(zero - 15) <= 1 &&
                  at_zero <= kLaguerreZeroCeiling;
  return {5, "Fock-resolved dynamics", ok,
          fmt("carrier max rise %.4f over n = 0..10; bsb min %.4f over n = 0..14 (s = 0.4, 200 us); "
              "Laguerre zero n = %d, carrier there %.4f",
              worst_rise, bsb_min, zero, at_zero)};
}

Line thermal_convergence(SweepResult& keep) {
  SweepSpec spec = default_spec(ExperimentKind::thermal_pulse_length_scan);
  spec.axes = {{"t_pulse", "us", {}}};
  for (int t = 110; t <= 200; t += 15) spec.axes[0].values.push_back(units::us(t));
  keep = thermal_pulse_length_scan(spec);
  hygiene.add(keep);
  const auto ground = keep.efficiencies("bsb_ground");
  const auto thermal = keep.efficiencies("bsb_thermal");
  double gap = 0.0, at = 0.0;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    if (std::abs(ground[i] - thermal[i]) > gap) {
      gap = std::abs(ground[i] - thermal[i]);
      at = spec.axes[0].values[i];
    }
  }
  return {6, "thermal convergence", gap < kThermalGap,
          fmt("max |ground - thermal| %.4f at t_pulse %.0f us (t_pulse 110..200 us)", gap, units::to_us(at))};
}

Line thermometry_line() {
  SweepSpec spec = default_spec(ExperimentKind::thermometry);
  spec.axes = {{"t_pulse", "us", {}}};
  for (int t = 120; t <= 150; t += 5) spec.axes[0].values.push_back(units::us(t));
  const auto result = thermometry(spec);
  hygiene.add(result.scan);
  const double w = units::MHz(2.2), gamma = units::MHz(41.3);
  const double t_ref = temperature_from_p0(kP0, w, gamma);
  const bool ok = std::abs(result.estimate.p0 - kP0) <= kP0Tol && std::abs(t_ref - kTemperature) <= kTemperatureTol;
  return {7, "thermometry round trip", ok,
          fmt("p0 %.4f +- %.4f (truth %.4f); T/T_D at p0 = 0.08: %.3f; at extracted p0: %.3f",
              result.estimate.p0, result.estimate.uncertainty, result.expected_p0, t_ref,
              result.temperature_ratio)};
}

struct Comparison {
  double rabi_first_max = 0.0;
  double stirap_max = 0.0;
};

Comparison compare(Transition transition, double s, double t_rabi_stop) {
  SweepSpec spec = default_spec(ExperimentKind::compare_rabi_stirap);
  spec.schedule.transition = transition;
  spec.schedule.s_factor = s;
  spec.axes = {{"t_pulse", "us", {units::us(100), units::us(150), units::us(200)}}, {"t_rabi", "us", {}}};
  for (double t = 0.5; t <= t_rabi_stop + 1e-9; t += 0.5) spec.axes[1].values.push_back(units::us(t));
  const auto r = compare_rabi_stirap(spec);
  hygiene.add(r);
  Comparison c;
  const auto rabi = r.efficiencies("rabi");
  for (std::size_t i = 0; i < rabi.size(); ++i) {
    c.rabi_first_max = std::max(c.rabi_first_max, rabi[i]);
    if (i + 1 < rabi.size() && rabi[i + 1] < rabi[i] - kOscillation) break;
  }
  for (double e : r.efficiencies("stirap")) c.stirap_max = std::max(c.stirap_max, e);
  return c;
}

Line stirap_vs_rabi() {
  const auto bsb = compare(Transition::blue_sideband, 0.5, 30.0);
  const auto car = compare(Transition::carrier, 0.7, 30.0);
  const bool ok = std::abs(bsb.rabi_first_max - kBsbRabi) <= kRabiTol && bsb.stirap_max >= kBsbStirap &&
                  std::abs(car.rabi_first_max - kCarrierRabi) <= kRabiTol && car.stirap_max >= kCarrierStirap;
  return {8, "STIRAP vs Rabi", ok,
          fmt("bsb: Rabi first max %.3f, STIRAP max %.3f; carrier: Rabi first max %.3f, STIRAP max %.3f",
              bsb.rabi_first_max, bsb.stirap_max, car.rabi_first_max, car.stirap_max)};
}

double plateau_point(const SystemParams& params, const EvolveOptions& options, Diagnostics* diag = nullptr) {
  const double omega = beam_rabi_frequency(params);
  const auto schedule = make_delay_schedule(units::us(120), units::us(80), omega, omega);
  const auto traj = evolve_fock(params, schedule, 0, Level::one, endpoint_grid(schedule), options, 4);
  if (diag) *diag = traj.diagnostics;
  return transfer_efficiency(traj);
}

Line hygiene_line() {
  EvolveOptions options;
  Diagnostics d;
  const double coarse = plateau_point(SystemParams{}, options, &d);
  hygiene.add(d);
  options.tol /= 2.0;
  const double fine = plateau_point(SystemParams{}, options);
  const double change = std::abs(coarse - fine);
  const bool gates = hygiene.trace <= kTraceGate && hygiene.herm <= kHermiticityGate &&
                     hygiene.purity <= kPurityGate && hygiene.failed == 0;
  return {9, "numerical hygiene", gates && change < kHalvingTol,
          fmt("%zu runs: trace %.1e, hermiticity %.1e, purity %.1e, failed %zu; tol halving change %.1e",
              hygiene.points, hygiene.trace, hygiene.herm, hygiene.purity, hygiene.failed, change)};
}

Line cross_solver() {
  EvolveOptions options;
  const SystemParams base;
  const double eff = plateau_point(base, options);
  const double d50 = std::abs(plateau_point(rescaled_full_model(base, 50.0), options) - eff);
  const double d200 = std::abs(plateau_point(rescaled_full_model(base, 200.0), options) - eff);
  return {10, "cross-solver oracle", d50 <= kFullVsEff50 && d200 <= kFullVsEff200,
          fmt("|full - effective| %.2e at Delta = 50 W, %.2e at 200 W (effective %.6f)", d50, d200, eff)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number; all run by default.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::function<Line()>> criteria{
      eigen_system,
      adiabaticity_traces,
      [] { SweepResult r; return delay_scan_line(r); },
      regime_maps,
      fock_resolved,
      [] { SweepResult r; return thermal_convergence(r); },
      thermometry_line,
      stirap_vs_rabi,
      hygiene_line,
      cross_solver,
  };
  int failed = 0, ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(k + 1)) == only.end()) continue;
    const auto& run = criteria[k];
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Line line;
    try {
      line = run();
    } catch (const std::exception& e) {
      line = {0, "exception", false, e.what()};
    }
    failed += !line.pass;
    std::printf("%s %2d %-24s %s [%.1f s]\n", line.pass ? "PASS" : "FAIL", line.id, line.name.c_str(),
                line.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
