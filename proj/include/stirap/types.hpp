#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace stirap {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Matrix3c = Eigen::Matrix<Complex<Scalar>, 3, 3>;

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using SparseMatrixXc = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// SI conversion helpers. Frequencies given in Hz-like units are returned as
/// angular frequencies (rad/s); everything internal is seconds and rad/s.
namespace units {
constexpr double s(double v) { return v; }
constexpr double ms(double v) { return v * 1e-3; }
constexpr double us(double v) { return v * 1e-6; }
constexpr double ns(double v) { return v * 1e-9; }
constexpr double Hz(double v) { return two_pi * v; }
constexpr double kHz(double v) { return two_pi * v * 1e3; }
constexpr double MHz(double v) { return two_pi * v * 1e6; }
constexpr double GHz(double v) { return two_pi * v * 1e9; }
constexpr double to_us(double seconds) { return seconds * 1e6; }
}  // namespace units

/// Raised when an integration cannot meet its contract (step-size underflow,
/// non-finite state). Carries the simulation time at which it happened.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Raised for malformed or inconsistent run configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stirap
