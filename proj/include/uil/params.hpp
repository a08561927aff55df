#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uil {

/// Full parameter point of the two-path interferometer.
///
/// Angles are in radians. `kappa` is the amplitude attenuation exponent of
/// the probe arm (field transmission exp(-kappa)), `eta` the common detector
/// efficiency, and `alpha` the coherent amplitude fed into port a0 (port b0
/// is vacuum).
template <typename Scalar = double>
struct InterferometerParams {
  Scalar theta1 = std::numbers::pi_v<Scalar> / 4;
  Scalar theta2 = std::numbers::pi_v<Scalar> / 4;
  Scalar phi = std::numbers::pi_v<Scalar> / 2;
  Scalar kappa = 0;
  Scalar eta = 1;
  std::complex<Scalar> alpha{1, 0};

  /// Throws std::domain_error when an invariant is violated.
  void validate() const {
    using std::isfinite;
    if (!isfinite(theta1) || !isfinite(theta2) || !isfinite(phi))
      throw std::domain_error("interferometer angles must be finite");
    if (!isfinite(kappa) || kappa < 0)
      throw std::domain_error("kappa must be finite and >= 0, got " + std::to_string(double(kappa)));
    if (!(eta > 0 && eta <= 1))
      throw std::domain_error("eta must lie in (0, 1], got " + std::to_string(double(eta)));
    if (!isfinite(alpha.real()) || !isfinite(alpha.imag()))
      throw std::domain_error("alpha must be finite");
  }

  Scalar transmission() const { return std::exp(-kappa); }
};

/// Maps a splitting angle onto [0, pi/2] keeping the intensity split
/// cos^2 / sin^2 unchanged. Only the sign of the interference term can differ.
template <typename Scalar>
Scalar canonical_splitting_angle(Scalar theta) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (!std::isfinite(theta)) throw std::domain_error("splitting angle must be finite");
  Scalar t = std::fmod(theta, pi);
  if (t < 0) t += pi;
  return t > pi / 2 ? pi - t : t;
}

}  // namespace uil
