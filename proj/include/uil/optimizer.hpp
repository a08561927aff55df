#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "uil/params.hpp"

namespace uil {

enum class Objective { rho_intensity, rho_fluctuation };

enum class RegimeKind {
  free,             // theta1, theta2 independent
  equal_splitters,  // theta1 = theta2 (one splitter used twice)
  fixed_mixer,      // theta2 = pi/4, theta1 free
};

struct ConstraintRegime {
  RegimeKind kind = RegimeKind::free;
  double kappa = 0;
  /// Fixed working point; std::nullopt searches phi over [0, pi] as well.
  std::optional<double> phi = std::numbers::pi / 2;
  double eta = 1;
  std::complex<double> alpha{1, 0};

  void validate() const;
};

enum class OptimumKind {
  interior,           // attained maximum strictly inside the angle range
  boundary_supremum,  // approached as theta1 -> 0, finite limit
  unbounded,          // grows without bound as theta1 -> 0
};

struct OptimumReport {
  double theta1 = 0;
  double theta2 = 0;
  double phi = 0;
  double value = 0;  // achieved maximum, or the limit for boundary suprema
  Objective objective = Objective::rho_fluctuation;
  ConstraintRegime regime;
  OptimumKind kind = OptimumKind::interior;
  std::size_t evaluations = 0;
  double bracket_width = 0;  // final golden-section bracket per coordinate
  double grid_best = 0;      // best value among the grid points
};

struct OptimizerOptions {
  int grid_points = 721;           // per free angle, 1-D and 2-D searches
  int grid_points_3d = 181;        // per axis when theta1, theta2 and phi are all free
  int max_refinement_sweeps = 60;
};

class NoSensitivityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Maximises the chosen performance ratio over the mixing angles allowed by
/// the regime. Coarse grid scan followed by cyclic golden-section refinement
/// of the best cell until every bracket is narrower than `tol`. Deterministic;
/// grid ties go to the lexicographically smallest (theta1, theta2, phi).
OptimumReport optimize(Objective objective, const ConstraintRegime& regime, double tol,
                       const OptimizerOptions& options = {});

/// Phase minimising Delta phi at fixed angles (searched over (0, pi)).
/// Throws NoSensitivityError if sin(2 theta1) sin(2 theta2) = 0.
double working_point(const InterferometerParams<double>& params, double tol = 1e-12);

std::string to_string(Objective objective);
std::string to_string(RegimeKind kind);
std::string to_string(OptimumKind kind);

}  // namespace uil
