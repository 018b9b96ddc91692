#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stirap/dynamics.hpp"
#include "stirap/experiments.hpp"
#include "stirap/hamiltonian.hpp"
#include "stirap/lambda_model.hpp"

using namespace stirap;

namespace {

PulseSchedule reference(const SystemParams& p) {
  const double omega = beam_rabi_frequency(p);
  return make_delay_schedule(units::us(120), units::us(80), omega, omega);
}

}  // namespace

TEST_CASE("Hamiltonians are Hermitian") {
  SystemParams p;
  p.n_max = 8;
  for (auto tr : {Transition::carrier, Transition::blue_sideband, Transition::red_sideband}) {
    const auto q = with_transition(p, tr);
    const auto full = rescaled_full_model(q, 50.0);
    for (double t : {-40e-6, 0.0, 25e-6}) {
      const MatrixXc he = build_effective_hamiltonian(q, reference(q), t);
      const MatrixXc hf = build_full_hamiltonian(full, reference(full), t);
      CHECK((he - he.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * he.cwiseAbs().maxCoeff());
      CHECK((hf - hf.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * hf.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("eta -> 0 reduces the full model to Lambda blocks") {
  SystemParams p;
  p.eta = 1e-6;
  p.n_max = 4;
  p = rescaled_full_model(p, 50.0);
  const auto s = reference(p);
  const double t = 10e-6;
  const MatrixXc h = build_full_hamiltonian(p, s, t);
  const Eigen::Matrix3cd lambda = lambda_hamiltonian(s.pump_value(t), s.stokes_value(t), p.delta, p.delta);
  for (int n = 0; n < p.n_max; ++n) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const cplx expected = lambda(a, b) + (a == b ? cplx(n * p.trap_frequency) : cplx(0.0));
        CHECK(std::abs(h(a * p.n_max + n, b * p.n_max + n) - expected) <= 1e-9 * p.delta);
      }
    }
  }
}

TEST_CASE("effective model: no Stokes leaves only the pump Stark shift") {
  SystemParams p;
  p.n_max = 4;
  const auto s = make_rabi_schedule(units::us(10), beam_rabi_frequency(p), 0.0);
  const MatrixXc h = build_effective_hamiltonian(p, s, units::us(5));
  const double w = beam_rabi_frequency(p);
  CHECK(h.block(0, p.n_max, p.n_max, p.n_max).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h(0, 0).real() == doctest::Approx(-w * w / (4 * p.delta)));
  CHECK(h(p.n_max, p.n_max).real() == doctest::Approx(0.0));
}

TEST_CASE("Rabi oracle: constant resonant drive") {
  SystemParams p;
  p.eta = 1e-6;
  p.n_max = 3;
  const double w = beam_rabi_frequency(p);
  const double duration = units::us(12);
  const auto s = make_rabi_schedule(duration, w, w);
  const auto grid = uniform_grid(0.0, duration, 49);
  const auto traj = evolve(CompositeState::basis(2, p.n_max, Level::one, 0), p, s, grid);
  const double rate = p.target_effective_rabi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(level_population(traj, i) - std::pow(std::sin(rate * grid[i] / 2), 2)) <= 1e-6);
  }
  // pi-pulse
  const auto pi = make_rabi_schedule(std::numbers::pi / rate, w, w);
  const auto end = evolve(CompositeState::basis(2, p.n_max, Level::one, 0), p, pi, endpoint_grid(pi));
  CHECK(transfer_efficiency(end) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("Debye-Waller reduced carrier rate") {
  SystemParams p;
  const double w = beam_rabi_frequency(p);
  const double rate = p.target_effective_rabi * std::exp(-p.eta * p.eta / 2);
  const auto pi = make_rabi_schedule(std::numbers::pi / rate, w, w);
  const auto traj = evolve_fock(p, pi, 0, Level::one, endpoint_grid(pi), {}, 4);
  CHECK(transfer_efficiency(traj) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("zero drive keeps populations") {
  SystemParams p;
  p.n_max = 4;
  const auto s = make_delay_schedule(units::us(50), units::us(30), 0.0, 0.0);
  const auto start = CompositeState::product(2, Level::three, make_thermal(1.0, 4));
  const auto traj = evolve(start, p, s, default_grid(s));
  CHECK(transfer_efficiency(traj) == doctest::Approx(1.0));
  CHECK((traj.final_state->density() - start.density()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("reference STIRAP point") {
  SystemParams p = rescaled_full_model(SystemParams{}, 50.0);
  p.n_max = 5;
  const auto s = reference(p);
  const auto traj = evolve(CompositeState::basis(3, p.n_max, Level::one, 0), p, s, default_grid(s));
  CHECK(transfer_efficiency(traj) >= 0.98);
  double excited = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) excited = std::max(excited, level_population(traj, i, Level::two));
  CHECK(excited < 0.01);
  CHECK(traj.diagnostics.passes_gates());
}

TEST_CASE("dark-state tracking") {
  SystemParams p;
  p.eta = 1e-6;
  p.n_max = 2;
  const auto s = reference(p);
  EvolveOptions options;
  options.store_states = true;
  const auto traj = evolve(CompositeState::basis(2, p.n_max, Level::one, 0), p, s, default_grid(s), options);
  double worst = 1.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    // adiabatic window: both beams above a tenth of their peak
    if (s.pump_value(t) < 0.1 * s.omega_p_max() || s.stokes_value(t) < 0.1 * s.omega_s_max()) continue;
    const double theta = mixing_angle(s.pump_value(t), s.stokes_value(t));
    const auto& psi = traj.states[i].amplitudes();
    const cplx overlap = std::cos(theta) * psi(0) - std::sin(theta) * psi(p.n_max);
    worst = std::min(worst, std::norm(overlap));
  }
  CHECK(worst >= 0.98);
}

TEST_CASE("integrators agree") {
  const SystemParams p;
  EvolveOptions magnus;
  EvolveOptions dopri;
  dopri.integrator = Integrator::dormand_prince;
  const auto s = reference(p);
  const double a = transfer_efficiency(evolve_fock(p, s, 0, Level::one, endpoint_grid(s), magnus, 3));
  const double b = transfer_efficiency(evolve_fock(p, s, 0, Level::one, endpoint_grid(s), dopri, 3));
  CHECK(std::abs(a - b) <= 1e-6);
}

TEST_CASE("pure and density evolution agree") {
  SystemParams p;
  p.n_max = 6;
  const auto s = reference(p);
  EvolveOptions options;
  options.tol = 1e-10;
  const auto pure = CompositeState::basis(2, p.n_max, Level::one, 0);
  const auto a = evolve(pure, p, s, endpoint_grid(s), options);
  const auto b = evolve(CompositeState::mixed(2, p.n_max, pure.density()), p, s, endpoint_grid(s), options);
  CHECK((a.final_state->density() - b.final_state->density()).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(b.diagnostics.passes_gates());
}

TEST_CASE("tolerance halving converges") {
  const SystemParams p;
  const auto s = reference(p);
  EvolveOptions options;
  const double coarse = transfer_efficiency(evolve_fock(p, s, 0, Level::one, endpoint_grid(s), options, 4));
  options.tol /= 2;
  const double fine = transfer_efficiency(evolve_fock(p, s, 0, Level::one, endpoint_grid(s), options, 4));
  CHECK(std::abs(coarse - fine) < 1e-6);
}

TEST_CASE("motional window matches the full basis") {
  SystemParams p = with_transition(SystemParams{}, Transition::blue_sideband);
  p.n_max = 18;
  const auto s = reference(p);
  for (int n : {0, 3, 8}) {
    const double windowed = transfer_efficiency(evolve_fock(p, s, n, Level::one, endpoint_grid(s), {}, 4));
    const double full = transfer_efficiency(evolve_fock(p, s, n, Level::one, endpoint_grid(s), {}, 0));
    CHECK(std::abs(windowed - full) <= 1e-4);
  }
}

TEST_CASE("full and effective models agree at large detuning") {
  SystemParams p;
  p.n_max = 5;
  const auto s = reference(p);
  const double eff = transfer_efficiency(evolve_fock(p, s, 0, Level::one, endpoint_grid(s), {}, 0));
  const auto full = rescaled_full_model(p, 50.0);
  const auto sf = reference(full);
  const double f = transfer_efficiency(evolve_fock(full, sf, 0, Level::one, endpoint_grid(sf), {}, 0));
  CHECK(std::abs(f - eff) <= 1e-2);
}

TEST_CASE("input validation") {
  const SystemParams p;
  const auto s = reference(p);
  EvolveOptions options;
  options.tol = 1e-3;
  CHECK_THROWS(evolve(CompositeState::basis(2, p.n_max, Level::one, 0), p, s, endpoint_grid(s), options));
  CHECK_THROWS(evolve(CompositeState::basis(3, p.n_max, Level::one, 0), p, s, endpoint_grid(s)));
  SystemParams bad = p;
  bad.electronic_levels = 3;
  bad.delta = 100.0 * p.target_effective_rabi;  // Delta / W = sqrt(50)
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
