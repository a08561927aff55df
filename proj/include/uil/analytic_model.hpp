#pragma once

// Closed-form model of the intensity-unbalanced two-path interferometer.
//
// Input |alpha, 0>, first splitter B(theta1), mirror phase (and optional
// amplitude loss) on the probe arm, second splitter B(theta2), and the
// difference observable O = n_b3 - n_a3. Everything here is a pure function of
// InterferometerParams and is templated on the scalar type.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "uil/mode_labels.hpp"
#include "uil/params.hpp"

namespace uil {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
using ComplexMatrix2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Real two-mode splitter [[cos, sin], [-sin, cos]] acting on (a, b).
template <typename Scalar>
Matrix2<Scalar> beam_splitter_matrix(Scalar theta) {
  if (!std::isfinite(theta)) throw std::domain_error("beam splitter angle must be finite");
  using std::cos;
  using std::sin;
  Matrix2<Scalar> m;
  m << cos(theta), sin(theta), -sin(theta), cos(theta);
  return m;
}

/// Mirror stage: diag entry exp(-i phi - kappa) on the `probe` slot, 1 on the
/// other. kappa > 0 is not unitary and is only meaningful for coherent input.
template <typename Scalar>
ComplexMatrix2<Scalar> mirror_matrix(Scalar phi, Scalar kappa = 0, Mode probe = kProbeMode) {
  ComplexMatrix2<Scalar> m = ComplexMatrix2<Scalar>::Identity();
  m(slot(probe), slot(probe)) = std::exp(std::complex<Scalar>(-kappa, -phi));
  return m;
}

/// B(theta2) M(phi, kappa) B(theta1).
template <typename Scalar>
ComplexMatrix2<Scalar> transfer_matrix(const InterferometerParams<Scalar>& p,
                                       Mode probe = kProbeMode) {
  using C = std::complex<Scalar>;
  return beam_splitter_matrix(p.theta2).template cast<C>() * mirror_matrix(p.phi, p.kappa, probe) *
         beam_splitter_matrix(p.theta1).template cast<C>();
}

template <typename Scalar = double>
struct OutputAmplitudes {
  std::complex<Scalar> a3;  // towards D_a
  std::complex<Scalar> b3;  // towards D_b
};

/// Coherent amplitudes at the two detectors for input (alpha, 0).
template <typename Scalar>
OutputAmplitudes<Scalar> output_amplitudes(const InterferometerParams<Scalar>& p,
                                           Mode probe = kProbeMode) {
  using C = std::complex<Scalar>;
  const Eigen::Matrix<C, 2, 1> out = transfer_matrix(p, probe) * Eigen::Matrix<C, 2, 1>(p.alpha, C(0));
  return {out(0), out(1)};
}

template <typename Scalar = double>
struct ProbeArmStats {
  Scalar intensity;      // I_b1 = |alpha|^2 sin^2(theta1)
  Scalar std_intensity;  // Delta I_b1 = |alpha sin(theta1)|
};

/// Intensity and photon-number fluctuation in the probe arm, evaluated right
/// after the first splitter (before mirror and loss).
template <typename Scalar>
ProbeArmStats<Scalar> probe_arm_stats(const InterferometerParams<Scalar>& p) {
  using std::abs;
  using std::sin;
  const Scalar amp = abs(p.alpha) * abs(sin(p.theta1));
  return {amp * amp, amp};
}

/// <b3^dag b3 - a3^dag a3>.
template <typename Scalar>
Scalar expectation_O(const InterferometerParams<Scalar>& p) {
  using std::cos;
  using std::norm;
  using std::sin;
  if (p.kappa == 0) {
    const Scalar c1 = cos(p.theta1), s1 = sin(p.theta1);
    const Scalar c2 = cos(p.theta2), s2 = sin(p.theta2);
    return norm(p.alpha) * (4 * s2 * c1 * c2 * s1 * cos(p.phi) - 1 + 2 * c1 * c1 -
                            4 * c2 * c2 * c1 * c1 + 2 * c2 * c2);
  }
  const auto out = output_amplitudes(p);
  return norm(out.b3) - norm(out.a3);
}

/// Standard deviation of O. The output is a product coherent state, so the two
/// photon counts are independent Poisson variables and Var(O) is the total
/// detected intensity |alpha|^2 (cos^2 theta1 + exp(-2 kappa) sin^2 theta1).
template <typename Scalar>
Scalar std_O(const InterferometerParams<Scalar>& p) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  const Scalar c1 = cos(p.theta1), s1 = sin(p.theta1);
  if (p.kappa == 0) return abs(p.alpha);
  const Scalar t = exp(-p.kappa);
  return abs(p.alpha) * sqrt(c1 * c1 + t * t * s1 * s1);
}

/// d<O>/dphi = -|alpha|^2 exp(-kappa) sin(2 theta1) sin(2 theta2) sin(phi).
template <typename Scalar>
Scalar phase_gradient_O(const InterferometerParams<Scalar>& p) {
  using std::exp;
  using std::norm;
  using std::sin;
  return -norm(p.alpha) * exp(-p.kappa) * sin(2 * p.theta1) * sin(2 * p.theta2) * sin(p.phi);
}

namespace detail {

template <typename Scalar>
Scalar phase_sensitivity(const InterferometerParams<Scalar>& p) {
  using std::abs;
  using std::sin;
  return abs(p.alpha) * abs(sin(2 * p.theta1) * sin(2 * p.theta2) * sin(p.phi));
}

// cos(2 theta1)(e^{2 kappa} - 1) + e^{2 kappa} + 1
template <typename Scalar>
Scalar loss_numerator_sq(Scalar theta1, Scalar kappa) {
  using std::cos;
  using std::exp;
  const Scalar e2k = exp(2 * kappa);
  return cos(2 * theta1) * (e2k - 1) + e2k + 1;
}

}  // namespace detail

/// Lossless angular resolution 1/|alpha sin 2theta1 sin 2theta2 sin phi|;
/// +infinity when there is no phase sensitivity. Ignores kappa and eta.
template <typename Scalar>
Scalar delta_phi_lossless(const InterferometerParams<Scalar>& p) {
  const Scalar den = detail::phase_sensitivity(p);
  if (den == 0) return std::numeric_limits<Scalar>::infinity();
  return 1 / den;
}

/// Angular resolution with probe-arm loss kappa. Ignores eta.
template <typename Scalar>
Scalar delta_phi_lossy(const InterferometerParams<Scalar>& p) {
  using std::sqrt;
  const Scalar den = sqrt(Scalar(2)) * detail::phase_sensitivity(p);
  if (den == 0) return std::numeric_limits<Scalar>::infinity();
  return sqrt(detail::loss_numerator_sq(p.theta1, p.kappa)) / den;
}

/// Effective angular resolution. Detector efficiency enters as Delta phi / eta,
/// which turns both performance ratios into eta times their ideal values.
template <typename Scalar>
Scalar delta_phi(const InterferometerParams<Scalar>& p) {
  const Scalar ideal = p.kappa == 0 ? delta_phi_lossless(p) : delta_phi_lossy(p);
  return ideal / p.eta;
}

/// Intensity-based performance ratio 1/(Delta phi I_b1).
///
/// Returns 0 when Delta phi is infinite, and +infinity when the probe arm is
/// dark but Delta phi is finite (the formally unbounded regime).
template <typename Scalar>
Scalar rho_intensity(const InterferometerParams<Scalar>& p) {
  using std::abs;
  using std::sin;
  const Scalar dphi = delta_phi(p);
  if (std::isinf(dphi)) return 0;
  const Scalar intensity = probe_arm_stats(p).intensity;
  if (intensity == 0) return std::numeric_limits<Scalar>::infinity();
  if (p.kappa == 0) {
    const Scalar s1 = sin(p.theta1);
    return p.eta * abs(sin(2 * p.theta1) * sin(2 * p.theta2) * sin(p.phi)) / (abs(p.alpha) * s1 * s1);
  }
  return 1 / (dphi * intensity);
}

/// Fluctuation-based performance ratio 1/(Delta phi Delta I_b1).
///
/// Independent of |alpha|. The factor sin(2 theta1)/|sin theta1| is written as
/// 2|cos theta1|, which fills the removable singularity at theta1 = 0 with its
/// limit. For kappa > 0 the pre-mirror Delta I_b1 is kept as the back-action
/// measure.
template <typename Scalar>
Scalar rho_fluctuation(const InterferometerParams<Scalar>& p) {
  using std::abs;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar angular = 2 * abs(cos(p.theta1) * sin(2 * p.theta2) * sin(p.phi));
  if (p.kappa == 0) return p.eta * angular;
  return p.eta * angular * sqrt(Scalar(2)) / sqrt(detail::loss_numerator_sq(p.theta1, p.kappa));
}

/// rho_fluctuation at theta2 = pi/4, phi = pi/2, eta = 1 in its printed lossy
/// form sqrt(2)|sin 2theta1| / (|sin theta1| sqrt(...)). Kept separate from
/// rho_fluctuation so the two can be cross-checked. theta1 with sin(theta1) = 0
/// returns the limit.
template <typename Scalar>
Scalar rho_fluctuation_balanced_mixer(Scalar theta1, Scalar kappa) {
  using std::abs;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar root = sqrt(detail::loss_numerator_sq(theta1, kappa));
  const Scalar s1 = sin(theta1);
  if (s1 == 0) return 2 * sqrt(Scalar(2)) * abs(cos(theta1)) / root;
  return sqrt(Scalar(2)) * abs(sin(2 * theta1)) / (abs(s1) * root);
}

/// Michelson fringe visibility of |b3(phi)|^2 as phi runs over a full period.
/// Returns 0 for zero input.
template <typename Scalar>
Scalar visibility(const InterferometerParams<Scalar>& p) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::sin;
  if (p.alpha == std::complex<Scalar>(0)) return 0;
  const Scalar t = exp(-p.kappa);
  const Scalar c1 = cos(p.theta1), s1 = sin(p.theta1);
  const Scalar c2 = cos(p.theta2), s2 = sin(p.theta2);
  // |b3|^2 / |alpha|^2 = s2^2 c1^2 + t^2 c2^2 s1^2 + 2 t s2 c2 c1 s1 cos(phi)
  const Scalar mean = s2 * s2 * c1 * c1 + t * t * c2 * c2 * s1 * s1;
  if (mean == 0) return 0;
  const Scalar swing = abs(2 * t * s2 * c2 * c1 * s1);
  return swing / mean;
}

template <typename Scalar = double>
struct PerformanceMetrics {
  Scalar mean_O;
  Scalar std_O;
  Scalar delta_phi;
  Scalar intensity_probe;
  Scalar std_intensity_probe;
  Scalar rho_intensity;
  Scalar rho_fluctuation;
  Scalar visibility;
};

template <typename Scalar>
PerformanceMetrics<Scalar> performance_metrics(const InterferometerParams<Scalar>& p) {
  p.validate();
  const auto probe = probe_arm_stats(p);
  return {expectation_O(p),  std_O(p),          delta_phi(p),       probe.intensity,
          probe.std_intensity, rho_intensity(p), rho_fluctuation(p), visibility(p)};
}

}  // namespace uil
