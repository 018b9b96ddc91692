#pragma once

#include <string>
#include <vector>

#include "stirap/types.hpp"

namespace stirap {

enum class Transition { carrier, blue_sideband, red_sideband };

std::string to_string(Transition transition);
Transition transition_from_string(const std::string& name);

/// Motional quantum number change driven by a transition (0, +1, -1).
int motional_step(Transition transition);

/// Generalized Laguerre polynomial L_n^k(x) by upward three-term recurrence
///   (m+1) L_{m+1} = (2m+1+k-x) L_m - (m+k) L_{m-1}.
/// Stable for the small arguments (x = eta^2 < 0.1) used for Lamb-Dicke
/// matrix elements.
template <typename Scalar>
Scalar laguerre(int n, int k, Scalar x) {
  if (n < 0 || k < 0) {
    throw std::invalid_argument("laguerre: n and k must be non-negative");
  }
  if (n > 200) {
    throw std::invalid_argument("laguerre: n must not exceed 200");
  }
  Scalar previous(1);
  if (n == 0) return previous;
  Scalar current = Scalar(1 + k) - x;
  for (int m = 1; m < n; ++m) {
    const Scalar next = (Scalar(2 * m + 1 + k) - x) * current - Scalar(m + k) * previous;
    previous = current;
    current = next / Scalar(m + 1);
  }
  return current;
}

/// <n_to| exp(i eta (a + a^dagger)) |n_from>, including the i^|dn| phase.
cplx lamb_dicke_element(int n_to, int n_from, double eta);

/// Ratio of the n-dependent Rabi frequency to the bare two-photon Rabi
/// frequency, signed (carrier changes sign at Laguerre zeros). For the red
/// sideband n is the initial Fock index and must be >= 1.
double coupling_scale(int n, Transition transition, double eta);

/// Populations over Fock indices 0..n_max-1. The truncation tail (1 - sum) is
/// kept explicit rather than renormalized away.
class MotionalDistribution {
 public:
  MotionalDistribution() = default;
  explicit MotionalDistribution(std::vector<double> populations);

  const std::vector<double>& populations() const { return populations_; }
  double operator[](int n) const { return populations_.at(static_cast<std::size_t>(n)); }
  int n_max() const { return static_cast<int>(populations_.size()); }
  double total() const;
  double tail() const { return 1.0 - total(); }
  double mean_n() const;

  /// Structured warnings produced at construction (e.g. large truncation tail).
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string warning) { warnings_.push_back(std::move(warning)); }

 private:
  std::vector<double> populations_;
  std::vector<std::string> warnings_;
};

inline constexpr double kThermalTailWarning = 1e-2;

/// Bose-Einstein populations p_n = nbar^n / (nbar+1)^(n+1), n < n_max.
MotionalDistribution make_thermal(double mean_n, int n_max);

MotionalDistribution make_fock(int n, int n_max);

/// Smallest truncation n_max >= minimum whose thermal tail is below max_tail.
int thermal_truncation(double mean_n, double max_tail = kThermalTailWarning, int minimum = 2);

double ground_state_population(const MotionalDistribution& distribution);

/// Electronic levels of the Lambda system. The effective two-level model keeps
/// only `one` and `three`.
enum class Level { one, two, three };

/// Row index of a level within an electronic space of dimension 2 or 3.
int electronic_index(Level level, int electronic_dim);

/// State on the electronic (x) motional product space |e> (x) |n>, stored either
/// as amplitudes or as a density matrix. Basis index = e * motional_dim + n.
class CompositeState {
 public:
  /// `check` = false skips the normalization and Hermiticity checks, for states
  /// produced by an integrator whose residuals are reported separately.
  static CompositeState pure(int electronic_dim, int motional_dim, VectorXc amplitudes, bool check = true);
  static CompositeState mixed(int electronic_dim, int motional_dim, MatrixXc density, bool check = true);
  static CompositeState basis(int electronic_dim, int motional_dim, Level level, int n);
  /// Diagonal density with the electronic level fixed and the motion following
  /// `motion`, renormalized to unit trace.
  static CompositeState product(int electronic_dim, Level level, const MotionalDistribution& motion);

  int electronic_dim() const { return electronic_dim_; }
  int motional_dim() const { return motional_dim_; }
  int dimension() const { return electronic_dim_ * motional_dim_; }
  int index(Level level, int n) const {
    return electronic_index(level, electronic_dim_) * motional_dim_ + n;
  }

  bool is_pure() const { return pure_; }
  const VectorXc& amplitudes() const;
  MatrixXc density() const;

  double trace() const;
  double purity() const;
  /// Populations per electronic level (summed over motion).
  Eigen::VectorXd electronic_populations() const;
  /// Populations per Fock level (summed over electronic states).
  Eigen::VectorXd fock_populations() const;

 private:
  CompositeState(int electronic_dim, int motional_dim, bool pure)
      : electronic_dim_(electronic_dim), motional_dim_(motional_dim), pure_(pure) {}

  int electronic_dim_ = 0;
  int motional_dim_ = 0;
  bool pure_ = true;
  VectorXc amplitudes_;
  MatrixXc density_;
};

}  // namespace stirap
