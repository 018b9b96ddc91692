#include "stirap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <nlohmann/json.hpp>

#include "stirap/lambda_model.hpp"

namespace stirap {

std::string to_string(Integrator integrator) {
  return integrator == Integrator::magnus4 ? "magnus4" : "dormand_prince";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "magnus4" || name == "magnus") return Integrator::magnus4;
  if (name == "dormand_prince" || name == "dopri5") return Integrator::dormand_prince;
  throw std::invalid_argument("unknown integrator '" + name + "'");
}

void Diagnostics::merge(const Diagnostics& other) {
  max_trace_error = std::max(max_trace_error, other.max_trace_error);
  max_hermiticity_error = std::max(max_hermiticity_error, other.max_hermiticity_error);
  max_purity_drift = std::max(max_purity_drift, other.max_purity_drift);
  max_edge_population = std::max(max_edge_population, other.max_edge_population);
  accepted_steps += other.accepted_steps;
  rejected_steps += other.rejected_steps;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

namespace {

// Gauss-Legendre nodes and the commutator-free weights of the fourth-order
// two-exponential scheme.
const double kNode1 = 0.5 - std::sqrt(3.0) / 6.0;
const double kNode2 = 0.5 + std::sqrt(3.0) / 6.0;
const double kWeight1 = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
const double kWeight2 = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;

double max_abs(const VectorXc& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const MatrixXc& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Error norm over the rows flagged in `mask` (empty mask: all rows).
double masked_max(const VectorXc& v, const std::vector<char>& mask) {
  if (mask.empty()) return max_abs(v);
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask[i]) m = std::max(m, std::abs(v(i)));
  }
  return m;
}
double masked_max(const MatrixXc& r, const std::vector<char>& mask) {
  if (mask.empty()) return max_abs(r);
  double m = 0.0;
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    if (!mask[j]) continue;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      if (mask[i]) m = std::max(m, std::abs(r(i, j)));
    }
  }
  return m;
}

// In the three-level model the excited amplitude is slaved to the ground
// manifold and carries a fast e^{i Delta t} ripple of size ~Omega/Delta; step
// control watches only the ground-manifold amplitudes.
std::vector<char> error_mask(const SystemParams& params, Eigen::Index dim) {
  if (params.electronic_levels != 3) return {};
  std::vector<char> mask(dim, 1);
  const Eigen::Index m = dim / 3;
  for (Eigen::Index n = 0; n < m; ++n) mask[m + n] = 0;
  return mask;
}

double diag_population(const VectorXc& psi, Eigen::Index i) { return std::norm(psi(i)); }
double diag_population(const MatrixXc& rho, Eigen::Index i) { return rho(i, i).real(); }

double trace_of(const VectorXc& psi) { return psi.squaredNorm(); }
double trace_of(const MatrixXc& rho) { return rho.trace().real(); }

double purity_of(const VectorXc& psi) {
  const double n = psi.squaredNorm();
  return n * n;
}
double purity_of(const MatrixXc& rho) { return rho.cwiseAbs2().sum(); }

double hermiticity_of(const VectorXc&) { return 0.0; }
double hermiticity_of(const MatrixXc& rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

/// exp(-i dt A) for Hermitian A, applied to a state.
///
/// Moderate ||dt A|| uses a truncated Taylor series on the state with
/// norm-based substeps (sparse products only); large norms, as in the
/// three-level model, fall back to a dense eigendecomposition.
class ExpApplier {
 public:
  void apply(const SparseMatrixXc& a, double dt, VectorXc& psi) {
    if (!taylor(a, dt, psi)) eigen_apply(MatrixXc(a), dt, psi);
  }

  void apply(const SparseMatrixXc& a, double dt, MatrixXc& rho) {
    MatrixXc x = rho;
    if (!taylor(a, dt, x)) {
      eigen_apply(MatrixXc(a), dt, rho);
      return;
    }
    MatrixXc y = x.adjoint();
    taylor(a, dt, y);
    rho = y.adjoint();
  }

 private:
  static constexpr double kTheta = 4.0;
  static constexpr double kTaylorLimit = 64.0;

  template <typename Block>
  bool taylor(const SparseMatrixXc& a, double dt, Block& x) {
    const Eigen::Index n = a.rows();
    const int* outer = a.outerIndexPtr();
    const int* inner = a.innerIndexPtr();
    const cplx* values = a.valuePtr();
    double mu = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = outer[i]; k < outer[i + 1]; ++k) {
        if (inner[k] == i) mu += values[k].real();
      }
    }
    mu /= static_cast<double>(n);
    double norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (int k = outer[i]; k < outer[i + 1]; ++k) row += std::abs(inner[k] == i ? values[k] - mu : values[k]);
      norm = std::max(norm, row);
    }
    const double scaled = std::abs(dt) * norm;
    if (scaled > kTaylorLimit) return false;
    const int substeps = std::max(1, static_cast<int>(std::ceil(scaled / kTheta)));
    const double h = dt / substeps;
    const cplx shift = std::polar(1.0, -h * mu);
    term_.resize(n);
    next_.resize(n);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      cplx* col = x.data() + c * n;
      for (int sub = 0; sub < substeps; ++sub) {
        double size = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          term_[i] = col[i];
          size += std::norm(col[i]);
        }
        if (size == 0.0) break;
        const double stop = 1e-34 * size;
        for (int order = 1; order <= 80; ++order) {
          const cplx factor(0.0, -h / order);
          double t2 = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            cplx acc = -mu * term_[i];
            for (int k = outer[i]; k < outer[i + 1]; ++k) acc += values[k] * term_[inner[k]];
            next_[i] = factor * acc;
            t2 += std::norm(next_[i]);
          }
          for (Eigen::Index i = 0; i < n; ++i) col[i] += next_[i];
          std::swap(term_, next_);
          if (t2 <= stop) break;
        }
        for (Eigen::Index i = 0; i < n; ++i) col[i] *= shift;
      }
    }
    return true;
  }

  void eigen_apply(const MatrixXc& a, double dt, VectorXc& psi) {
    solver_.compute(a);
    const auto& v = solver_.eigenvectors();
    VectorXc tmp = v.adjoint() * psi;
    for (Eigen::Index i = 0; i < tmp.size(); ++i) tmp(i) *= std::polar(1.0, -dt * solver_.eigenvalues()(i));
    psi.noalias() = v * tmp;
  }

  void eigen_apply(const MatrixXc& a, double dt, MatrixXc& rho) {
    solver_.compute(a);
    const auto& v = solver_.eigenvectors();
    VectorXc phases(v.cols());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(1.0, -dt * solver_.eigenvalues()(i));
    const MatrixXc u = v * phases.asDiagonal() * v.adjoint();
    rho = (u * rho * u.adjoint()).eval();
  }

  Eigen::SelfAdjointEigenSolver<MatrixXc> solver_;
  std::vector<cplx> term_;
  std::vector<cplx> next_;
};

template <typename State>
class Recorder {
 public:
  Recorder(Trajectory& traj, int electronic_dim, int motional_dim, bool store, double purity0)
      : traj_(traj), e_dim_(electronic_dim), m_dim_(motional_dim), store_(store), purity0_(purity0) {}

  void check_edges(const State& s) {
    double edge = 0.0;
    for (int e = 0; e < e_dim_; ++e) {
      const Eigen::Index base = static_cast<Eigen::Index>(e) * m_dim_;
      edge += diag_population(s, base + m_dim_ - 1) + diag_population(s, base + m_dim_ - 2);
      if (traj_.n_offset > 0) edge += diag_population(s, base) + diag_population(s, base + 1);
    }
    auto& d = traj_.diagnostics;
    d.max_edge_population = std::max(d.max_edge_population, edge);
  }

  void record(double t, const State& s) {
    Eigen::VectorXd electronic = Eigen::VectorXd::Zero(e_dim_);
    Eigen::VectorXd fock = Eigen::VectorXd::Zero(m_dim_);
    for (int e = 0; e < e_dim_; ++e) {
      for (int n = 0; n < m_dim_; ++n) {
        const double p = diag_population(s, static_cast<Eigen::Index>(e) * m_dim_ + n);
        electronic(e) += p;
        fock(n) += p;
      }
    }
    traj_.times.push_back(t);
    traj_.electronic.push_back(std::move(electronic));
    traj_.fock.push_back(std::move(fock));
    auto& d = traj_.diagnostics;
    d.max_trace_error = std::max(d.max_trace_error, std::abs(trace_of(s) - 1.0));
    d.max_hermiticity_error = std::max(d.max_hermiticity_error, hermiticity_of(s));
    d.max_purity_drift = std::max(d.max_purity_drift, std::abs(purity_of(s) - purity0_));
    check_edges(s);
    if (store_) traj_.states.push_back(make_state(s));
  }

  CompositeState make_state(const VectorXc& psi) const { return CompositeState::pure(e_dim_, m_dim_, psi, false); }
  CompositeState make_state(const MatrixXc& rho) const { return CompositeState::mixed(e_dim_, m_dim_, rho, false); }

 private:
  Trajectory& traj_;
  int e_dim_;
  int m_dim_;
  bool store_;
  double purity0_;
};

double step_cap(const PulseSchedule& schedule, const EvolveOptions& options) {
  if (options.max_step > 0.0) return options.max_step;
  if (schedule.shape == PulseShape::square) {
    return std::max(schedule.square_end - schedule.square_start, 1e-12) / 4.0;
  }
  return std::min(schedule.pump.fwhm(), schedule.stokes.fwhm()) / 8.0;
}

[[noreturn]] void underflow(double t, const SystemParams& params) {
  std::ostringstream msg;
  msg << "step-size underflow at t = " << units::to_us(t) << " us";
  if (params.electronic_levels == 3) msg << "; consider a smaller rescaled detuning ratio";
  throw NumericalError(msg.str(), t);
}

template <typename State>
void cf4_step(Hamiltonian& h, ExpApplier& ex, double t, double dt, State& s) {
  // Both evaluations share one sparsity pattern, so the stage matrices are
  // combined on the value arrays.
  SparseMatrixXc a = h.at(t + kNode1 * dt);
  SparseMatrixXc b = h.at(t + kNode2 * dt);
  const Eigen::Index nnz = a.nonZeros();
  Eigen::Map<Eigen::VectorXcd> va(a.valuePtr(), nnz);
  Eigen::Map<Eigen::VectorXcd> vb(b.valuePtr(), nnz);
  const Eigen::VectorXcd h1 = va;
  va = kWeight2 * h1 + kWeight1 * vb;
  vb = kWeight1 * h1 + kWeight2 * vb;
  ex.apply(a, dt, s);
  ex.apply(b, dt, s);
}

template <typename State>
State magnus_evolve(State s, Hamiltonian& h, const SystemParams& params, const PulseSchedule& schedule,
                    std::span<const double> grid, const EvolveOptions& options, Recorder<State>& rec,
                    Diagnostics& diag) {
  ExpApplier ex;
  const double span = grid.back() - grid.front();
  const double cap = step_cap(schedule, options);
  const double min_step = 1e-10 * span;
  const auto mask = error_mask(params, h.dim());
  double dt_try = options.initial_step > 0.0 ? options.initial_step : std::min(cap, span / 100.0);
  double t = grid.front();
  rec.record(t, s);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    while (t < target) {
      if (diag.accepted_steps + diag.rejected_steps >= options.max_steps) {
        throw NumericalError("step budget exhausted", t);
      }
      const bool clamped = dt_try >= target - t;
      const double dt = clamped ? target - t : dt_try;
      State full = s;
      cf4_step(h, ex, t, dt, full);
      State half = s;
      cf4_step(h, ex, t, 0.5 * dt, half);
      cf4_step(h, ex, t + 0.5 * dt, 0.5 * dt, half);
      // Richardson estimate of the local error of the two-half-step result.
      double err = masked_max(State(full - half), mask) / 15.0;
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
      const double factor =
          err > 0.0 ? std::clamp(0.9 * std::pow(options.tol / err, 0.2), 0.2, 4.0) : 4.0;
      if (err <= options.tol) {
        s = std::move(half);
        t = clamped ? target : t + dt;
        ++diag.accepted_steps;
        rec.check_edges(s);
        const double proposal = dt * factor;
        dt_try = std::min(cap, clamped ? std::max(dt_try, proposal) : proposal);
      } else {
        ++diag.rejected_steps;
        dt_try = dt * factor;
        if (dt_try < min_step) underflow(t, params);
      }
    }
    rec.record(t, s);
  }
  return s;
}

using OdeState = std::vector<cplx>;

VectorXc to_rotating(const VectorXc& psi, const Eigen::VectorXd& e, double t) {
  VectorXc out = psi;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, -e(i) * t);
  return out;
}

MatrixXc to_rotating(const MatrixXc& rho, const Eigen::VectorXd& e, double t) {
  MatrixXc out = rho;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) *= std::polar(1.0, -(e(i) - e(j)) * t);
  }
  return out;
}

template <typename State>
State from_ode(const OdeState& x, Eigen::Index dim) {
  if constexpr (std::is_same_v<State, VectorXc>) {
    return Eigen::Map<const VectorXc>(x.data(), dim);
  } else {
    return Eigen::Map<const MatrixXc>(x.data(), dim, dim);
  }
}

template <typename State>
State dopri_evolve(const State& initial, Hamiltonian& h, const SystemParams& params,
                   std::span<const double> grid, const EvolveOptions& options, const PulseSchedule& schedule,
                   Recorder<State>& rec, Diagnostics& diag) {
  namespace ode = boost::numeric::odeint;
  const Eigen::Index dim = h.dim();
  const Eigen::VectorXd& e = h.static_energies();
  const double t0 = grid.front();

  State start = to_rotating(initial, e, -t0);  // into the interaction frame
  OdeState x(start.data(), start.data() + start.size());

  auto rhs = [&h, dim](const OdeState& in, OdeState& out, double t) {
    const SparseMatrixXc& m = h.at(t);
    out.resize(in.size());
    if constexpr (std::is_same_v<State, VectorXc>) {
      Eigen::Map<const VectorXc> psi(in.data(), dim);
      Eigen::Map<VectorXc> dpsi(out.data(), dim);
      dpsi.noalias() = cplx(0.0, -1.0) * (m * psi);
    } else {
      Eigen::Map<const MatrixXc> rho(in.data(), dim, dim);
      Eigen::Map<MatrixXc> drho(out.data(), dim, dim);
      drho.noalias() = m * rho;
      drho.noalias() -= rho * m;
      drho *= cplx(0.0, -1.0);
    }
  };

  auto stepper = ode::make_controlled(options.tol, options.tol, ode::runge_kutta_dopri5<OdeState>());
  const double span = grid.back() - grid.front();
  const double cap = step_cap(schedule, options);
  const double min_step = 1e-12 * span;
  double dt_try = options.initial_step > 0.0 ? options.initial_step : std::min(cap, span * 1e-6);
  double t = t0;
  rec.record(t, initial);
  State current = initial;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double target = grid[i];
    while (t < target) {
      if (diag.accepted_steps + diag.rejected_steps >= options.max_steps) {
        throw NumericalError("step budget exhausted", t);
      }
      const bool clamped = dt_try >= target - t;
      double dt = clamped ? target - t : dt_try;
      const double before = t;
      const auto result = stepper.try_step(rhs, x, t, dt);
      if (result == ode::success) {
        if (clamped) t = target;
        ++diag.accepted_steps;
        // odeint already proposes the next step in dt
        dt_try = std::min(cap, clamped ? std::max(dt_try, dt) : dt);
        current = to_rotating(from_ode<State>(x, dim), e, t);
        rec.check_edges(current);
      } else {
        ++diag.rejected_steps;
        t = before;
        dt_try = dt;
        if (dt_try < min_step) underflow(t, params);
      }
    }
    current = to_rotating(from_ode<State>(x, dim), e, t);
    rec.record(t, current);
  }
  return current;
}

template <typename State>
void run(const State& initial, int electronic_dim, int motional_dim, const SystemParams& params,
         const PulseSchedule& schedule, std::span<const double> grid, const EvolveOptions& options,
         Trajectory& traj) {
  Recorder<State> rec(traj, electronic_dim, motional_dim, options.store_states, purity_of(initial));
  State final_state;
  if (options.integrator == Integrator::magnus4) {
    Hamiltonian h = make_hamiltonian(params, schedule, Frame::rotating);
    final_state = magnus_evolve(initial, h, params, schedule, grid, options, rec, traj.diagnostics);
  } else {
    Hamiltonian h = make_hamiltonian(params, schedule, Frame::interaction);
    final_state = dopri_evolve(initial, h, params, grid, options, schedule, rec, traj.diagnostics);
  }
  traj.final_state = rec.make_state(final_state);
}

}  // namespace

Trajectory evolve(const CompositeState& initial, const SystemParams& params, const PulseSchedule& schedule,
                  std::span<const double> grid, const EvolveOptions& options) {
  params.validate();
  if (!(options.tol >= 1e-12 && options.tol <= 1e-6)) {
    throw std::invalid_argument("evolve: tol must lie in [1e-12, 1e-6]");
  }
  if (initial.electronic_dim() != params.electronic_levels || initial.motional_dim() != params.n_max) {
    throw std::invalid_argument("evolve: initial state does not match the model dimensions");
  }
  if (grid.size() < 2) throw std::invalid_argument("evolve: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("evolve: grid must be strictly increasing");
  }

  Trajectory traj;
  traj.n_offset = params.n_offset;
  if (initial.is_pure()) {
    run<VectorXc>(initial.amplitudes(), initial.electronic_dim(), initial.motional_dim(), params, schedule, grid,
                  options, traj);
  } else {
    run<MatrixXc>(initial.density(), initial.electronic_dim(), initial.motional_dim(), params, schedule, grid,
                  options, traj);
  }

  auto& d = traj.diagnostics;
  if (d.max_edge_population > kEdgePopulationWarning) {
    std::ostringstream msg;
    msg << "truncation: outermost Fock levels reached population " << d.max_edge_population;
    d.warnings.push_back(msg.str());
  }
  return traj;
}

double level_population(const Trajectory& trajectory, std::size_t i, Level target) {
  const auto& p = trajectory.electronic.at(i);
  return p(electronic_index(target, static_cast<int>(p.size())));
}

double transfer_efficiency(const Trajectory& trajectory, Level target) {
  if (trajectory.electronic.empty()) throw std::invalid_argument("transfer_efficiency: empty trajectory");
  return level_population(trajectory, trajectory.electronic.size() - 1, target);
}

std::vector<double> default_grid(const PulseSchedule& schedule) {
  const auto [start, stop] = schedule.window();
  const double stride = schedule.t_pulse / 200.0;
  const auto points = static_cast<std::size_t>(std::ceil((stop - start) / stride - 1e-9)) + 1;
  return uniform_grid(start, stop, std::max<std::size_t>(points, 2));
}

std::vector<double> endpoint_grid(const PulseSchedule& schedule) {
  const auto [start, stop] = schedule.window();
  return {start, stop};
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
  if (trajectory.electronic.empty()) return;
  const auto e_dim = trajectory.electronic.front().size();
  const auto m_dim = trajectory.fock.front().size();
  out << "t_us";
  if (e_dim == 3) {
    out << ",P_1,P_2,P_3";
  } else {
    out << ",P_1,P_3";
  }
  for (Eigen::Index n = 0; n < m_dim; ++n) out << ",p_" << trajectory.n_offset + n;
  out << '\n';
  const auto precision = out.precision(12);
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    out << units::to_us(trajectory.times[i]);
    for (Eigen::Index e = 0; e < e_dim; ++e) out << ',' << trajectory.electronic[i](e);
    for (Eigen::Index n = 0; n < m_dim; ++n) out << ',' << trajectory.fock[i](n);
    out << '\n';
  }
  out.precision(precision);
}

std::string summary_json(const Trajectory& trajectory) {
  nlohmann::json j;
  if (!trajectory.electronic.empty()) {
    const auto& last = trajectory.electronic.back();
    j["final_populations"] = std::vector<double>(last.data(), last.data() + last.size());
    j["transfer_efficiency"] = transfer_efficiency(trajectory);
    j["t_end_us"] = units::to_us(trajectory.times.back());
  }
  const auto& d = trajectory.diagnostics;
  j["diagnostics"] = {{"max_trace_error", d.max_trace_error},
                      {"max_hermiticity_error", d.max_hermiticity_error},
                      {"max_purity_drift", d.max_purity_drift},
                      {"max_edge_population", d.max_edge_population},
                      {"accepted_steps", d.accepted_steps},
                      {"rejected_steps", d.rejected_steps},
                      {"passes_gates", d.passes_gates()},
                      {"warnings", d.warnings}};
  return j.dump(2);
}

}  // namespace stirap
