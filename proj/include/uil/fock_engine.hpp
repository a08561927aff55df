#pragma once

// Truncated two-mode Fock-space simulator.
//
// Acts as a brute-force oracle for the closed-form model: it never uses the
// mode-transformation formulas, only ladder operators, matrix exponentials of
// quadratic generators and explicit state vectors. Basis ordering of a
// two-mode vector is index(n_a, n_b) = n_a * d + n_b with d = n_max + 1.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "uil/mode_labels.hpp"
#include "uil/params.hpp"

namespace uil::fock {

using Complex = std::complex<double>;

inline constexpr double kDefaultTailTolerance = 1e-10;
inline constexpr double kDefaultEdgeTolerance = 1e-8;
inline constexpr int kDefaultCutoff = 40;

/// Highest retained photon number per mode.
class FockCutoff {
 public:
  explicit FockCutoff(int n_max);

  int n_max() const { return n_max_; }
  int dim() const { return n_max_ + 1; }
  int two_mode_dim() const { return dim() * dim(); }
  std::ptrdiff_t index(int n_a, int n_b) const { return std::ptrdiff_t(n_a) * dim() + n_b; }

  friend bool operator==(const FockCutoff&, const FockCutoff&) = default;

 private:
  int n_max_;
};

/// Raised when the Poisson tail of a coherent state beyond n_max is too heavy.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(double tail_mass, int n_max, int required_cutoff);
  double tail_mass() const { return tail_mass_; }
  int n_max() const { return n_max_; }
  int required_cutoff() const { return required_cutoff_; }

 private:
  double tail_mass_;
  int n_max_;
  int required_cutoff_;
};

/// Poisson probability mass above n_max for mean photon number `mean`.
double poisson_tail_mass(double mean, int n_max);

/// Smallest n_max whose coherent-state tail is below `tail_tol`.
int required_cutoff(double abs_alpha, double tail_tol = kDefaultTailTolerance);

/// Single-mode coherent state e^{-|alpha|^2/2} alpha^n / sqrt(n!), truncated
/// without renormalization. Throws TruncationError when the discarded tail
/// mass is >= tail_tol.
Eigen::VectorXcd coherent_state(Complex alpha, FockCutoff cutoff,
                                 double tail_tol = kDefaultTailTolerance);

struct TwoModeState {
  Eigen::VectorXcd amplitudes;
  FockCutoff cutoff;

  static TwoModeState product(const Eigen::VectorXcd& mode_a, const Eigen::VectorXcd& mode_b);

  double norm_squared() const { return amplitudes.squaredNorm(); }
  /// Population on basis states with n_a == n_max or n_b == n_max.
  double edge_mass() const;
  /// <n_m> and <n_m^2>.
  double mean_number(Mode m) const;
  double mean_number_squared(Mode m) const;
  Complex overlap(const TwoModeState& other) const { return amplitudes.dot(other.amplitudes); }
};

enum class OperatorKind { annihilation, creation, number, unitary, general };

struct ModeOperatorMatrix {
  Eigen::MatrixXcd entries;
  OperatorKind kind = OperatorKind::general;
  std::optional<Mode> mode;  // set for single-mode factors

  /// max |(U^dag U - I)_ij|
  double unitarity_defect() const;
};

struct LadderOperators {
  ModeOperatorMatrix annihilation;
  ModeOperatorMatrix creation;
};

/// Single-mode a and a^dag on {|0>..|n_max>}.
LadderOperators mode_operators(FockCutoff cutoff);

/// Lifts a single-mode d x d operator onto the two-mode space.
ModeOperatorMatrix embed(const ModeOperatorMatrix& single, Mode mode);

/// exp(theta (a^dag b - a b^dag)): in the Heisenberg picture U^dag a U =
/// cos(theta) a + sin(theta) b and U^dag b U = -sin(theta) a + cos(theta) b.
ModeOperatorMatrix beam_splitter_unitary(double theta, FockCutoff cutoff);

/// Applies the beam splitter to a state without materialising the matrix.
TwoModeState apply_beam_splitter(double theta, const TwoModeState& state);

/// exp(-i phi n_mode).
ModeOperatorMatrix phase_unitary(double phi, FockCutoff cutoff, Mode mode = kProbeMode);

TwoModeState apply_phase(double phi, const TwoModeState& state, Mode mode = kProbeMode);

/// Amplitude loss exp(-kappa) on one mode, dilated as a beam splitter with
/// cos(theta_loss) = exp(-kappa) onto a vacuum ancilla. The ancilla is traced
/// out by keeping one unnormalised branch per ancilla photon number k; the
/// branch operators K_k[m, n] = <m, k| U_loss |n, 0> are Kraus operators of the
/// channel.
class LossChannel {
 public:
  LossChannel(double kappa, FockCutoff cutoff, Mode mode = kProbeMode);

  double kappa() const { return kappa_; }
  Mode mode() const { return mode_; }
  const std::vector<Eigen::MatrixXcd>& kraus() const { return kraus_; }

  /// Branches whose norms are zero are dropped; the squared norms sum to the
  /// input norm.
  std::vector<TwoModeState> apply(const TwoModeState& state) const;

  /// sum_k K_k^dag K_k, equal to identity for a trace-preserving channel.
  Eigen::MatrixXcd completeness() const;

 private:
  double kappa_;
  FockCutoff cutoff_;
  Mode mode_;
  std::vector<Eigen::MatrixXcd> kraus_;
};

LossChannel loss_channel(double kappa, FockCutoff cutoff, Mode mode = kProbeMode);

struct SimulationOptions {
  double tail_tol = kDefaultTailTolerance;
  double edge_tol = kDefaultEdgeTolerance;
};

struct SimulationResult {
  double mean_O = 0;
  double std_O = 0;
  double probe_intensity = 0;
  double probe_std = 0;
  double edge_mass = 0;
  bool truncation_warning = false;
};

/// Lossless pipeline U_B(theta2) U_phase(phi) U_B(theta1) |alpha, 0>.
/// Throws std::invalid_argument for kappa > 0.
TwoModeState evolve_lossless(const InterferometerParams<double>& params, FockCutoff cutoff,
                             const SimulationOptions& options = {});

/// Full pipeline with the dilated loss channel. O = n_b - n_a at the output,
/// probe statistics right after the first splitter.
SimulationResult simulate(const InterferometerParams<double>& params, FockCutoff cutoff,
                          const SimulationOptions& options = {});

}  // namespace uil::fock
