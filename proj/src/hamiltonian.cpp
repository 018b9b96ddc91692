#include "stirap/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace stirap {

void SystemParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be positive and finite");
  if (!std::isfinite(two_photon_detuning)) throw ConfigError("two_photon_detuning must be finite");
  if (!(trap_frequency > 0.0)) throw ConfigError("trap_frequency must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (n_max < 2) throw ConfigError("n_max must be >= 2");
  if (n_max + n_offset > 200) throw ConfigError("Fock basis must stay below n = 200");
  if (n_offset < 0) throw ConfigError("n_offset must be >= 0");
  if (electronic_levels != 2 && electronic_levels != 3) throw ConfigError("electronic_levels must be 2 or 3");
  if (!(target_effective_rabi > 0.0)) throw ConfigError("target_effective_rabi must be positive");
  if (electronic_levels == 3 && detuning_ratio(*this) < kMinDetuningRatio * (1.0 - 1e-12)) {
    throw ConfigError("three-level model needs delta >= 20 x the single-beam Rabi frequency");
  }
}

double two_photon_detuning_for(Transition transition, double trap_frequency) {
  return motional_step(transition) * trap_frequency;
}

SystemParams with_transition(SystemParams params, Transition transition) {
  params.two_photon_detuning = two_photon_detuning_for(transition, params.trap_frequency);
  return params;
}

double beam_rabi_frequency(const SystemParams& params) {
  return std::sqrt(2.0 * params.delta * params.target_effective_rabi);
}

double detuning_ratio(const SystemParams& params) { return params.delta / beam_rabi_frequency(params); }

SystemParams rescaled_full_model(SystemParams params, double ratio) {
  if (!(ratio >= kMinDetuningRatio)) {
    throw ConfigError("detuning ratio must be >= 20 for the three-level model");
  }
  params.delta = 2.0 * ratio * ratio * params.target_effective_rabi;
  params.electronic_levels = 3;
  return params;
}

std::size_t Hamiltonian::add_term(const std::vector<Entry>& entries) {
  if (finalized_) throw std::logic_error("Hamiltonian: add_term after finalize");
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= dim_ || e.col < 0 || e.col >= dim_) {
      throw std::out_of_range("Hamiltonian: entry outside the basis");
    }
  }
  terms_.push_back(Term{entries, {}});
  return terms_.size() - 1;
}

void Hamiltonian::finalize() {
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (const auto& term : terms_) {
    for (const auto& e : term.entries) triplets.emplace_back(e.row, e.col, cplx(1.0));
  }
  matrix_.resize(dim_, dim_);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
  const auto* outer = matrix_.outerIndexPtr();
  const auto* inner = matrix_.innerIndexPtr();
  for (auto& term : terms_) {
    term.slots.clear();
    for (const auto& e : term.entries) {
      const auto* first = inner + outer[e.row];
      const auto* last = inner + outer[e.row + 1];
      const auto* hit = std::lower_bound(first, last, static_cast<int>(e.col));
      term.slots.push_back(hit - inner);
    }
  }
  coefficient_buffer_.assign(terms_.size(), cplx(0.0));
  finalized_ = true;
}

const SparseMatrixXc& Hamiltonian::at(double t) {
  if (!finalized_) finalize();
  std::fill(coefficient_buffer_.begin(), coefficient_buffer_.end(), cplx(0.0));
  if (coefficients_) coefficients_(t, coefficient_buffer_);
  cplx* values = matrix_.valuePtr();
  std::fill(values, values + matrix_.nonZeros(), cplx(0.0));
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const cplx c = coefficient_buffer_[k];
    if (c == cplx(0.0)) continue;
    const Term& term = terms_[k];
    for (std::size_t j = 0; j < term.entries.size(); ++j) values[term.slots[j]] += c * term.entries[j].value;
  }
  return matrix_;
}

namespace {

constexpr int kMaxSideband = 2;

std::vector<Hamiltonian::Entry> diagonal_entries(const Eigen::VectorXd& values) {
  std::vector<Hamiltonian::Entry> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) out.push_back({i, i, cplx(values[i])});
  }
  return out;
}

std::vector<Hamiltonian::Entry> block_identity(Eigen::Index first, int count) {
  std::vector<Hamiltonian::Entry> out;
  for (int j = 0; j < count; ++j) out.push_back({first + j, first + j, cplx(1.0)});
  return out;
}

/// Entries <e_to, n + k| D |e_from, n> for one sideband order k, plus the
/// Hermitian-conjugate entries in a separate list.
std::pair<std::vector<Hamiltonian::Entry>, std::vector<Hamiltonian::Entry>> sideband_entries(
    const SystemParams& p, Eigen::Index to_block, Eigen::Index from_block, int k, double scale) {
  std::vector<Hamiltonian::Entry> lower;
  std::vector<Hamiltonian::Entry> upper;
  for (int j = 0; j < p.n_max; ++j) {
    const int i = j + k;
    if (i < 0 || i >= p.n_max) continue;
    const cplx d = scale * lamb_dicke_element(p.n_offset + i, p.n_offset + j, p.eta);
    lower.push_back({to_block + i, from_block + j, d});
    upper.push_back({from_block + j, to_block + i, std::conj(d)});
  }
  return {lower, upper};
}

// Interaction-frame phase factor exp(i w t) for a coupling bridging energy gap w.
cplx phase(Frame frame, double gap, double t) {
  return frame == Frame::rotating ? cplx(1.0) : std::polar(1.0, gap * t);
}

}  // namespace

Hamiltonian make_full_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, Frame frame) {
  params.validate();
  if (params.electronic_levels != 3) throw ConfigError("full Hamiltonian requires electronic_levels = 3");
  const int n = params.n_max;
  const Eigen::Index dim = 3 * n;
  Hamiltonian h(dim, frame);

  Eigen::VectorXd energies(dim);
  const double delta_s = params.delta + params.two_photon_detuning;
  for (int j = 0; j < n; ++j) {
    const double motion = (params.n_offset + j) * params.trap_frequency;
    energies[j] = -params.delta + motion;
    energies[n + j] = motion;
    energies[2 * n + j] = -delta_s + motion;
  }
  h.set_static_energies(energies);

  const std::size_t static_term = h.add_term(diagonal_entries(energies));
  std::array<std::size_t, 2 * kMaxSideband + 1> pump_lower{};
  std::array<std::size_t, 2 * kMaxSideband + 1> pump_upper{};
  for (int k = -kMaxSideband; k <= kMaxSideband; ++k) {
    auto [lower, upper] = sideband_entries(params, n, 0, k, 0.5);
    pump_lower[k + kMaxSideband] = h.add_term(lower);
    pump_upper[k + kMaxSideband] = h.add_term(upper);
  }
  std::vector<Hamiltonian::Entry> stokes_lower;
  std::vector<Hamiltonian::Entry> stokes_upper;
  for (int j = 0; j < n; ++j) {
    stokes_lower.push_back({n + j, 2 * n + j, cplx(0.5)});
    stokes_upper.push_back({2 * n + j, n + j, cplx(0.5)});
  }
  const std::size_t stokes_l = h.add_term(stokes_lower);
  const std::size_t stokes_u = h.add_term(stokes_upper);

  const double nu = params.trap_frequency;
  const double delta = params.delta;
  h.set_coefficients([=](double t, std::vector<cplx>& c) {
    if (frame == Frame::rotating) c[static_term] = 1.0;
    const double wp = schedule.pump_value(t);
    const double ws = schedule.stokes_value(t);
    for (int k = -kMaxSideband; k <= kMaxSideband; ++k) {
      const cplx v = wp * phase(frame, k * nu + delta, t);
      c[pump_lower[k + kMaxSideband]] = v;
      c[pump_upper[k + kMaxSideband]] = std::conj(v);
    }
    const cplx v = ws * phase(frame, delta_s, t);
    c[stokes_l] = v;
    c[stokes_u] = std::conj(v);
  });
  h.finalize();
  return h;
}

Hamiltonian make_effective_hamiltonian(const SystemParams& params, const PulseSchedule& schedule,
                                       Frame frame) {
  params.validate();
  if (params.electronic_levels != 2) throw ConfigError("effective Hamiltonian requires electronic_levels = 2");
  const int n = params.n_max;
  const Eigen::Index dim = 2 * n;
  Hamiltonian h(dim, frame);

  Eigen::VectorXd energies(dim);
  for (int j = 0; j < n; ++j) {
    const double motion = (params.n_offset + j) * params.trap_frequency;
    energies[j] = motion;
    energies[n + j] = motion - params.two_photon_detuning;
  }
  h.set_static_energies(energies);

  const std::size_t static_term = h.add_term(diagonal_entries(energies));
  const std::size_t stark_1 = h.add_term(block_identity(0, n));
  const std::size_t stark_3 = h.add_term(block_identity(n, n));
  std::array<std::size_t, 2 * kMaxSideband + 1> lower_terms{};
  std::array<std::size_t, 2 * kMaxSideband + 1> upper_terms{};
  for (int k = -kMaxSideband; k <= kMaxSideband; ++k) {
    auto [lower, upper] = sideband_entries(params, n, 0, k, 1.0);
    lower_terms[k + kMaxSideband] = h.add_term(lower);
    upper_terms[k + kMaxSideband] = h.add_term(upper);
  }

  const double nu = params.trap_frequency;
  const double delta = params.delta;
  const double two_photon = params.two_photon_detuning;
  h.set_coefficients([=](double t, std::vector<cplx>& c) {
    if (frame == Frame::rotating) c[static_term] = 1.0;
    const double wp = schedule.pump_value(t);
    const double ws = schedule.stokes_value(t);
    c[stark_1] = -wp * wp / (4.0 * delta);
    c[stark_3] = -ws * ws / (4.0 * delta);
    const double g = -wp * ws / (4.0 * delta);
    for (int k = -kMaxSideband; k <= kMaxSideband; ++k) {
      const cplx v = g * phase(frame, k * nu - two_photon, t);
      c[lower_terms[k + kMaxSideband]] = v;
      c[upper_terms[k + kMaxSideband]] = std::conj(v);
    }
  });
  h.finalize();
  return h;
}

Hamiltonian make_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, Frame frame) {
  return params.electronic_levels == 3 ? make_full_hamiltonian(params, schedule, frame)
                                       : make_effective_hamiltonian(params, schedule, frame);
}

MatrixXc build_full_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, double t) {
  return make_full_hamiltonian(params, schedule, Frame::rotating).dense(t);
}

MatrixXc build_effective_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, double t) {
  return make_effective_hamiltonian(params, schedule, Frame::rotating).dense(t);
}

}  // namespace stirap
