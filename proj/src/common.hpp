#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace topopump {

using cplx = std::complex<double>;
using vec3 = Eigen::Vector3d;
using rvec = Eigen::VectorXd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using cmat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Dipole tilt at which 3cos^2(theta) - 1 vanishes.
inline const double magic_angle = std::acos(1.0 / std::sqrt(3.0));

enum class error_kind { config, numerical, domain };

/// Library error. The kind selects the CLI exit code.
class error : public std::runtime_error {
 public:
  error(error_kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  error_kind kind() const { return kind_; }

 private:
  error_kind kind_;
};

[[noreturn]] inline void fail_config(const std::string& msg) { throw error(error_kind::config, msg); }
[[noreturn]] inline void fail_numerical(const std::string& msg) { throw error(error_kind::numerical, msg); }
[[noreturn]] inline void fail_domain(const std::string& msg) { throw error(error_kind::domain, msg); }

/// Wraps k into [-pi/a, pi/a).
inline double wrap_k(double k, double a) {
  const double period = two_pi / a;
  double w = std::fmod(k + pi / a, period);
  if (w < 0) w += period;
  return w - pi / a;
}

}  // namespace topopump
