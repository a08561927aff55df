#pragma once

// Drives the Fock-space oracle against the closed-form model at seeded random
// parameter points.

#include <complex>
#include <cstdint>
#include <vector>

#include "uil/fock_engine.hpp"
#include "uil/params.hpp"

namespace uil {

struct VerifyConfig {
  std::complex<double> alpha{1, 0};
  int cutoff = fock::kDefaultCutoff;
  int samples = 50;
  std::uint64_t seed = 7;
  double tol = 1e-8;
};

/// Largest absolute analytic-vs-oracle differences over all samples.
struct Deviation {
  double mean_O = 0;
  double std_O = 0;
  double probe_intensity = 0;
  double probe_std = 0;

  double max() const;
};

struct VerifyReport {
  VerifyConfig config;
  Deviation deviation;
  /// max | std_O(oracle) - |alpha| | over the kappa = 0 checks.
  double lossless_std_deviation = 0;
  double max_edge_mass = 0;
  bool truncation_warning = false;
  bool passed = false;
};

/// theta1, theta2 uniform in [0, pi/2], phi in [0, 2 pi), kappa in [0, 1].
/// Uses mt19937_64 with an explicit 53-bit mapping so the points are identical
/// across standard libraries.
std::vector<InterferometerParams<double>> sample_parameter_points(std::complex<double> alpha, int samples,
                                                                  std::uint64_t seed);

/// Each sample is checked as drawn and again with kappa = 0. Throws
/// fock::TruncationError before any work if the cutoff is too small for alpha.
VerifyReport verify_against_oracle(const VerifyConfig& config);

}  // namespace uil
