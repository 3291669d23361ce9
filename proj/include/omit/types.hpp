#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace omit {

using cplx = std::complex<double>;

// Basis ordering for all 6x6 operators: (c, c*, b1, b1*, b2, b2*).
template <class Scalar>
using Matrix6 = Eigen::Matrix<std::complex<Scalar>, 6, 6>;
template <class Scalar>
using Vector6 = Eigen::Matrix<std::complex<Scalar>, 6, 1>;

using Matrix6c = Matrix6<double>;
using Vector6c = Vector6<double>;

// Mean-field state (c, b1, b2).
using State3 = Eigen::Vector3cd;

namespace constants {
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double coulomb_k = 8.9875517923e9;    // N m^2 / C^2
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

inline constexpr cplx I{0.0, 1.0};

/// Wraps a phase into [0, 2pi).
inline double wrap_phase(double phi) {
  double r = std::fmod(phi, constants::two_pi);
  if (r < 0.0) r += constants::two_pi;
  return r;
}

}  // namespace omit
