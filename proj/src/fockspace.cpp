#include "stirap/fockspace.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace stirap {

std::string to_string(Transition transition) {
  switch (transition) {
    case Transition::carrier: return "carrier";
    case Transition::blue_sideband: return "blue_sideband";
    case Transition::red_sideband: return "red_sideband";
  }
  return "unknown";
}

Transition transition_from_string(const std::string& name) {
  if (name == "carrier") return Transition::carrier;
  if (name == "blue_sideband" || name == "bsb") return Transition::blue_sideband;
  if (name == "red_sideband" || name == "rsb") return Transition::red_sideband;
  throw std::invalid_argument("unknown transition '" + name + "'");
}

int motional_step(Transition transition) {
  switch (transition) {
    case Transition::carrier: return 0;
    case Transition::blue_sideband: return 1;
    case Transition::red_sideband: return -1;
  }
  return 0;
}

cplx lamb_dicke_element(int n_to, int n_from, double eta) {
  if (n_to < 0 || n_from < 0) {
    throw std::invalid_argument("lamb_dicke_element: negative Fock index");
  }
  const int lower = std::min(n_to, n_from);
  const int upper = std::max(n_to, n_from);
  const int dn = upper - lower;
  const double eta2 = eta * eta;
  // exp(-eta^2/2) eta^dn sqrt(lower!/upper!) L_lower^dn(eta^2)
  double log_prefactor = -0.5 * eta2 + 0.5 * (std::lgamma(lower + 1.0) - std::lgamma(upper + 1.0));
  double magnitude = std::exp(log_prefactor) * std::pow(eta, dn) * laguerre(lower, dn, eta2);
  // i^dn, identical for raising and lowering since the operator is symmetric.
  static constexpr cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return magnitude * phases[dn % 4];
}

double coupling_scale(int n, Transition transition, double eta) {
  if (n < 0) throw std::invalid_argument("coupling_scale: negative Fock index");
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("coupling_scale: eta must lie in (0, 1)");
  }
  const double x = eta * eta;
  const double debye_waller = std::exp(-0.5 * x);
  switch (transition) {
    case Transition::carrier:
      return debye_waller * laguerre(n, 0, x);
    case Transition::blue_sideband:
      return debye_waller * eta * laguerre(n, 1, x) / std::sqrt(n + 1.0);
    case Transition::red_sideband:
      if (n == 0) {
        throw std::invalid_argument("coupling_scale: red sideband has no lower state for n = 0");
      }
      return coupling_scale(n - 1, Transition::blue_sideband, eta);
  }
  return 0.0;
}

MotionalDistribution::MotionalDistribution(std::vector<double> populations)
    : populations_(std::move(populations)) {
  for (double p : populations_) {
    if (!(p >= 0.0)) throw std::invalid_argument("MotionalDistribution: negative population");
  }
  if (total() > 1.0 + 1e-12) {
    throw std::invalid_argument("MotionalDistribution: populations sum above one");
  }
}

double MotionalDistribution::total() const {
  return std::accumulate(populations_.begin(), populations_.end(), 0.0);
}

double MotionalDistribution::mean_n() const {
  double sum = 0.0;
  for (std::size_t n = 0; n < populations_.size(); ++n) sum += static_cast<double>(n) * populations_[n];
  return sum;
}

MotionalDistribution make_thermal(double mean_n, int n_max) {
  if (!(mean_n >= 0.0)) throw std::invalid_argument("make_thermal: mean_n must be >= 0");
  if (n_max < 2) throw std::invalid_argument("make_thermal: n_max must be >= 2");
  std::vector<double> populations(static_cast<std::size_t>(n_max), 0.0);
  const double ratio = mean_n / (mean_n + 1.0);
  double p = 1.0 / (mean_n + 1.0);
  for (auto& value : populations) {
    value = p;
    p *= ratio;
  }
  MotionalDistribution distribution(std::move(populations));
  if (distribution.tail() > kThermalTailWarning) {
    std::ostringstream msg;
    msg << "truncation_tail: thermal tail " << distribution.tail() << " exceeds "
        << kThermalTailWarning << " at n_max = " << n_max << " (mean_n = " << mean_n << ")";
    distribution.add_warning(msg.str());
  }
  return distribution;
}

MotionalDistribution make_fock(int n, int n_max) {
  if (n < 0 || n >= n_max) throw std::invalid_argument("make_fock: n outside [0, n_max)");
  std::vector<double> populations(static_cast<std::size_t>(n_max), 0.0);
  populations[static_cast<std::size_t>(n)] = 1.0;
  return MotionalDistribution(std::move(populations));
}

int thermal_truncation(double mean_n, double max_tail, int minimum) {
  if (!(mean_n >= 0.0)) throw std::invalid_argument("thermal_truncation: mean_n must be >= 0");
  if (mean_n == 0.0) return std::max(minimum, 2);
  // tail(N) = (nbar / (nbar + 1))^N
  const double ratio = mean_n / (mean_n + 1.0);
  const int n = static_cast<int>(std::ceil(std::log(max_tail) / std::log(ratio)));
  int result = std::max({minimum, 2, n});
  while (std::pow(ratio, result) >= max_tail) ++result;
  return result;
}

double ground_state_population(const MotionalDistribution& distribution) {
  if (distribution.n_max() == 0) throw std::invalid_argument("ground_state_population: empty distribution");
  return distribution[0];
}

int electronic_index(Level level, int electronic_dim) {
  if (electronic_dim == 3) return static_cast<int>(level);
  if (electronic_dim == 2) {
    if (level == Level::two) {
      throw std::invalid_argument("level |2> is eliminated in the two-level model");
    }
    return level == Level::one ? 0 : 1;
  }
  throw std::invalid_argument("electronic dimension must be 2 or 3");
}

CompositeState CompositeState::pure(int electronic_dim, int motional_dim, VectorXc amplitudes, bool check) {
  if (electronic_dim != 2 && electronic_dim != 3) {
    throw std::invalid_argument("CompositeState: electronic dimension must be 2 or 3");
  }
  if (amplitudes.size() != electronic_dim * motional_dim) {
    throw std::invalid_argument("CompositeState: amplitude vector has wrong dimension");
  }
  CompositeState state(electronic_dim, motional_dim, true);
  state.amplitudes_ = std::move(amplitudes);
  if (check && std::abs(state.trace() - 1.0) > 1e-9) {
    throw std::invalid_argument("CompositeState: state is not normalized");
  }
  return state;
}

CompositeState CompositeState::mixed(int electronic_dim, int motional_dim, MatrixXc density, bool check) {
  if (electronic_dim != 2 && electronic_dim != 3) {
    throw std::invalid_argument("CompositeState: electronic dimension must be 2 or 3");
  }
  const Eigen::Index dim = electronic_dim * motional_dim;
  if (density.rows() != dim || density.cols() != dim) {
    throw std::invalid_argument("CompositeState: density matrix has wrong dimension");
  }
  if (check && (density - density.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("CompositeState: density matrix is not Hermitian");
  }
  CompositeState state(electronic_dim, motional_dim, false);
  state.density_ = std::move(density);
  if (check && std::abs(state.trace() - 1.0) > 1e-9) {
    throw std::invalid_argument("CompositeState: density matrix trace differs from one");
  }
  return state;
}

CompositeState CompositeState::basis(int electronic_dim, int motional_dim, Level level, int n) {
  if (n < 0 || n >= motional_dim) throw std::invalid_argument("CompositeState: Fock index out of range");
  VectorXc amplitudes = VectorXc::Zero(electronic_dim * motional_dim);
  amplitudes(electronic_index(level, electronic_dim) * motional_dim + n) = 1.0;
  return pure(electronic_dim, motional_dim, std::move(amplitudes));
}

CompositeState CompositeState::product(int electronic_dim, Level level, const MotionalDistribution& motion) {
  const int motional_dim = motion.n_max();
  const double total = motion.total();
  if (!(total > 0.0)) throw std::invalid_argument("CompositeState: empty motional distribution");
  MatrixXc density = MatrixXc::Zero(electronic_dim * motional_dim, electronic_dim * motional_dim);
  const int offset = electronic_index(level, electronic_dim) * motional_dim;
  for (int n = 0; n < motional_dim; ++n) density(offset + n, offset + n) = motion[n] / total;
  return mixed(electronic_dim, motional_dim, std::move(density));
}

const VectorXc& CompositeState::amplitudes() const {
  if (!pure_) throw std::logic_error("CompositeState: amplitudes requested from a mixed state");
  return amplitudes_;
}

MatrixXc CompositeState::density() const {
  if (pure_) return amplitudes_ * amplitudes_.adjoint();
  return density_;
}

double CompositeState::trace() const {
  if (pure_) return amplitudes_.squaredNorm();
  return density_.trace().real();
}

double CompositeState::purity() const {
  if (pure_) return amplitudes_.squaredNorm() * amplitudes_.squaredNorm();
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return density_.cwiseAbs2().sum();
}

Eigen::VectorXd CompositeState::electronic_populations() const {
  Eigen::VectorXd result(electronic_dim_);
  for (int e = 0; e < electronic_dim_; ++e) {
    double sum = 0.0;
    for (int n = 0; n < motional_dim_; ++n) {
      const int i = e * motional_dim_ + n;
      sum += pure_ ? std::norm(amplitudes_(i)) : density_(i, i).real();
    }
    result(e) = sum;
  }
  return result;
}

Eigen::VectorXd CompositeState::fock_populations() const {
  Eigen::VectorXd result = Eigen::VectorXd::Zero(motional_dim_);
  for (int e = 0; e < electronic_dim_; ++e) {
    for (int n = 0; n < motional_dim_; ++n) {
      const int i = e * motional_dim_ + n;
      result(n) += pure_ ? std::norm(amplitudes_(i)) : density_(i, i).real();
    }
  }
  return result;
}

}  // namespace stirap
