#pragma once

#include <functional>
#include <vector>

#include "stirap/fockspace.hpp"
#include "stirap/pulses.hpp"
#include "stirap/types.hpp"

namespace stirap {

/// Static physics parameters of the ion: Lambda-system detunings, trap and
/// Lamb-Dicke coupling, Fock truncation and model choice.
struct SystemParams {
  /// one-photon detuning Delta (rad/s)
  double delta = units::GHz(9.2);
  /// two-photon detuning selecting the resonance (0 carrier, +trap blue, -trap red)
  double two_photon_detuning = 0.0;
  double trap_frequency = units::MHz(2.2);
  double eta = 0.3;
  int n_max = 16;
  /// lowest Fock index kept; the basis spans n_offset .. n_offset + n_max - 1
  int n_offset = 0;
  /// 3 for the full Lambda model, 2 for the adiabatically eliminated model
  int electronic_levels = 2;
  /// bare two-photon Rabi frequency Wp,max Ws,max / (2 Delta) (rad/s)
  double target_effective_rabi = units::kHz(100);

  void validate() const;
};

/// Two-photon detuning that puts `transition` on resonance.
double two_photon_detuning_for(Transition transition, double trap_frequency);

SystemParams with_transition(SystemParams params, Transition transition);

/// Balanced single-beam peak Rabi frequency sqrt(2 Delta W_eff) reproducing the
/// target effective Rabi frequency at the configured detuning.
double beam_rabi_frequency(const SystemParams& params);

/// Full three-level parameters with the detuning rescaled to ratio * W_max while
/// W_eff = W_max^2 / (2 Delta) is preserved, i.e. Delta = 2 ratio^2 W_eff.
SystemParams rescaled_full_model(SystemParams params, double ratio);

/// Delta / W_max for the configured detuning and target.
double detuning_ratio(const SystemParams& params);

/// The three-level model needs Delta >= 20 W_max.
inline constexpr double kMinDetuningRatio = 20.0;

enum class Frame {
  /// frame of the laser difference frequency; Lambda detunings and trap energy explicit
  rotating,
  /// interaction picture w.r.t. the static diagonal; couplings carry phases
  interaction,
};

/// H(t) = sum_k c_k(t) H_k over a fixed sparsity pattern. Assembling at a new
/// time only rescales stored values, so one instance belongs to one integration.
class Hamiltonian {
 public:
  using CoefficientFn = std::function<void(double, std::vector<cplx>&)>;

  struct Entry {
    Eigen::Index row;
    Eigen::Index col;
    cplx value;
  };

  Hamiltonian(Eigen::Index dim, Frame frame) : dim_(dim), frame_(frame) {}

  /// Adds a term; returns its coefficient slot.
  std::size_t add_term(const std::vector<Entry>& entries);
  void set_coefficients(CoefficientFn fn) { coefficients_ = std::move(fn); }
  void finalize();

  Eigen::Index dim() const { return dim_; }
  Frame frame() const { return frame_; }
  std::size_t term_count() const { return terms_.size(); }

  /// Rotating-frame static diagonal; the interaction frame is taken w.r.t. it.
  const Eigen::VectorXd& static_energies() const { return static_energies_; }
  void set_static_energies(Eigen::VectorXd energies) { static_energies_ = std::move(energies); }

  const SparseMatrixXc& at(double t);
  MatrixXc dense(double t) { return MatrixXc(at(t)); }

 private:
  struct Term {
    std::vector<Entry> entries;
    std::vector<Eigen::Index> slots;
  };

  Eigen::Index dim_;
  Frame frame_;
  std::vector<Term> terms_;
  CoefficientFn coefficients_;
  std::vector<cplx> coefficient_buffer_;
  SparseMatrixXc matrix_;
  Eigen::VectorXd static_energies_;
  bool finalized_ = false;
};

/// Lambda (x) Fock Hamiltonian over 3 n_max states: Lambda detunings on the
/// diagonal, trap energy n * trap_frequency, pump coupling dressed by
/// <n'|exp(i eta (a + a^dag))|n> for |n' - n| <= 2, Stokes coupling diagonal
/// in n.
Hamiltonian make_full_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, Frame frame);

/// Two-level Raman Hamiltonian over 2 n_max states after eliminating |2>:
/// coupling -Wp Ws / (4 Delta) D_{n'n}, ac-Stark shifts -Wp^2/(4 Delta) on |1>
/// and -Ws^2/(4 Delta) on |3>, two-photon detuning on |3>.
Hamiltonian make_effective_hamiltonian(const SystemParams& params, const PulseSchedule& schedule,
                                       Frame frame);

/// Picks the full or effective model from params.electronic_levels.
Hamiltonian make_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, Frame frame);

/// Dense rotating-frame matrices at time t.
MatrixXc build_full_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, double t);
MatrixXc build_effective_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, double t);

}  // namespace stirap
