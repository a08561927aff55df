#include "uil/fock_engine.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace uil::fock {

namespace {

using RowMajorMatrixXcd = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Spectral data of the beam-splitter generator K = a^dag b - a b^dag on the
// truncated two-mode space.
//
// With S = diag(i^{n_a}), S^dag (i K) S = J := a^dag b + a b^dag, which is real
// symmetric. Writing J = W diag(lambda) W^T gives
//   exp(theta K) = S W diag(exp(-i theta lambda)) W^T S^dag,
// so a single real eigendecomposition per cutoff serves every angle.
struct SplitterSpectrum {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
  Eigen::VectorXcd signs;  // diagonal of S
};

SplitterSpectrum build_spectrum(FockCutoff cutoff) {
  const int d = cutoff.dim();
  const int n = cutoff.two_mode_dim();
  Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(n, n);
  for (int na = 0; na < cutoff.n_max(); ++na) {
    for (int nb = 1; nb < d; ++nb) {
      // a^dag b |na, nb> = sqrt((na + 1) nb) |na + 1, nb - 1>
      const auto from = cutoff.index(na, nb);
      const auto to = cutoff.index(na + 1, nb - 1);
      const double w = std::sqrt(double(na + 1) * double(nb));
      generator(to, from) = w;
      generator(from, to) = w;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(generator);
  if (solver.info() != Eigen::Success) throw std::runtime_error("beam splitter generator diagonalisation failed");

  static constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Eigen::VectorXcd signs(n);
  for (int na = 0; na < d; ++na)
    for (int nb = 0; nb < d; ++nb) signs(cutoff.index(na, nb)) = kPowersOfI[na % 4];
  return {solver.eigenvectors(), solver.eigenvalues(), std::move(signs)};
}

std::shared_ptr<const SplitterSpectrum> splitter_spectrum(FockCutoff cutoff) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SplitterSpectrum>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[cutoff.n_max()];
  if (!slot) slot = std::make_shared<const SplitterSpectrum>(build_spectrum(cutoff));
  return slot;
}

Eigen::VectorXcd apply_splitter(const SplitterSpectrum& spec, double theta, const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd w = spec.signs.conjugate().cwiseProduct(v);
  const Eigen::VectorXd wt_re = spec.vectors.transpose() * w.real();
  const Eigen::VectorXd wt_im = spec.vectors.transpose() * w.imag();
  Eigen::VectorXcd rotated(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    rotated(i) = std::polar(1.0, -theta * spec.values(i)) * Complex(wt_re(i), wt_im(i));
  const Eigen::VectorXd back_re = spec.vectors * rotated.real();
  const Eigen::VectorXd back_im = spec.vectors * rotated.imag();
  Eigen::VectorXcd out(w.size());
  out.real() = back_re;
  out.imag() = back_im;
  return spec.signs.cwiseProduct(out);
}

}  // namespace

FockCutoff::FockCutoff(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw std::domain_error("Fock cutoff n_max must be >= 1");
}

TruncationError::TruncationError(double tail_mass, int n_max, int required)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "coherent-state tail mass " << tail_mass << " beyond n_max = " << n_max
           << " exceeds tolerance; use a cutoff of at least " << required;
        return os.str();
      }()),
      tail_mass_(tail_mass),
      n_max_(n_max),
      required_cutoff_(required) {}

double poisson_tail_mass(double mean, int n_max) {
  if (mean < 0) throw std::domain_error("Poisson mean must be >= 0");
  if (mean == 0) return 0.0;
  const double log_mean = std::log(mean);
  double tail = 0.0;
  for (int n = n_max + 1;; ++n) {
    const double term = std::exp(-mean + n * log_mean - std::lgamma(n + 1.0));
    tail += term;
    if (n > mean && (term < 1e-300 || term < tail * 1e-17)) break;
  }
  return tail;
}

int required_cutoff(double abs_alpha, double tail_tol) {
  const double mean = abs_alpha * abs_alpha;
  int n = 1;
  while (poisson_tail_mass(mean, n) >= tail_tol) ++n;
  return n;
}

Eigen::VectorXcd coherent_state(Complex alpha, FockCutoff cutoff, double tail_tol) {
  const double mean = std::norm(alpha);
  const double tail = poisson_tail_mass(mean, cutoff.n_max());
  if (tail >= tail_tol) throw TruncationError(tail, cutoff.n_max(), required_cutoff(std::abs(alpha), tail_tol));

  Eigen::VectorXcd c(cutoff.dim());
  c(0) = std::exp(-mean / 2);
  for (int n = 1; n < cutoff.dim(); ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  return c;
}

TwoModeState TwoModeState::product(const Eigen::VectorXcd& mode_a, const Eigen::VectorXcd& mode_b) {
  if (mode_a.size() != mode_b.size()) throw std::invalid_argument("product state needs equal single-mode cutoffs");
  FockCutoff cutoff(int(mode_a.size()) - 1);
  Eigen::VectorXcd amps(cutoff.two_mode_dim());
  for (int na = 0; na < cutoff.dim(); ++na)
    for (int nb = 0; nb < cutoff.dim(); ++nb) amps(cutoff.index(na, nb)) = mode_a(na) * mode_b(nb);
  return {std::move(amps), cutoff};
}

double TwoModeState::edge_mass() const {
  const int n_max = cutoff.n_max();
  double mass = 0;
  for (int k = 0; k <= n_max; ++k) {
    mass += std::norm(amplitudes(cutoff.index(n_max, k)));
    if (k != n_max) mass += std::norm(amplitudes(cutoff.index(k, n_max)));
  }
  return mass;
}

double TwoModeState::mean_number(Mode m) const {
  double sum = 0;
  for (int na = 0; na < cutoff.dim(); ++na)
    for (int nb = 0; nb < cutoff.dim(); ++nb)
      sum += (m == Mode::a ? na : nb) * std::norm(amplitudes(cutoff.index(na, nb)));
  return sum;
}

double TwoModeState::mean_number_squared(Mode m) const {
  double sum = 0;
  for (int na = 0; na < cutoff.dim(); ++na)
    for (int nb = 0; nb < cutoff.dim(); ++nb) {
      const double n = m == Mode::a ? na : nb;
      sum += n * n * std::norm(amplitudes(cutoff.index(na, nb)));
    }
  return sum;
}

double ModeOperatorMatrix::unitarity_defect() const {
  const auto n = entries.rows();
  return (entries.adjoint() * entries - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

LadderOperators mode_operators(FockCutoff cutoff) {
  const int d = cutoff.dim();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return {{a, OperatorKind::annihilation, std::nullopt}, {a.adjoint(), OperatorKind::creation, std::nullopt}};
}

ModeOperatorMatrix embed(const ModeOperatorMatrix& single, Mode mode) {
  const auto d = single.entries.rows();
  FockCutoff cutoff(int(d) - 1);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int spectator = 0; spectator < d; ++spectator)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (single.entries(i, j) == Complex(0)) continue;
        if (mode == Mode::a)
          full(cutoff.index(i, spectator), cutoff.index(j, spectator)) = single.entries(i, j);
        else
          full(cutoff.index(spectator, i), cutoff.index(spectator, j)) = single.entries(i, j);
      }
  return {std::move(full), single.kind, std::nullopt};
}

ModeOperatorMatrix beam_splitter_unitary(double theta, FockCutoff cutoff) {
  if (!std::isfinite(theta)) throw std::domain_error("beam splitter angle must be finite");
  const auto spec = splitter_spectrum(cutoff);
  const Eigen::ArrayXd angle = -theta * spec->values.array();
  const Eigen::MatrixXd re = spec->vectors * angle.cos().matrix().asDiagonal() * spec->vectors.transpose();
  const Eigen::MatrixXd im = spec->vectors * angle.sin().matrix().asDiagonal() * spec->vectors.transpose();
  Eigen::MatrixXcd u(re.rows(), re.cols());
  u.real() = re;
  u.imag() = im;
  u = spec->signs.asDiagonal() * u * spec->signs.conjugate().asDiagonal();
  return {std::move(u), OperatorKind::unitary, std::nullopt};
}

TwoModeState apply_beam_splitter(double theta, const TwoModeState& state) {
  if (!std::isfinite(theta)) throw std::domain_error("beam splitter angle must be finite");
  const auto spec = splitter_spectrum(state.cutoff);
  return {apply_splitter(*spec, theta, state.amplitudes), state.cutoff};
}

ModeOperatorMatrix phase_unitary(double phi, FockCutoff cutoff, Mode mode) {
  Eigen::VectorXcd diag(cutoff.two_mode_dim());
  for (int na = 0; na < cutoff.dim(); ++na)
    for (int nb = 0; nb < cutoff.dim(); ++nb)
      diag(cutoff.index(na, nb)) = std::polar(1.0, -phi * (mode == Mode::a ? na : nb));
  return {diag.asDiagonal().toDenseMatrix(), OperatorKind::unitary, std::nullopt};
}

TwoModeState apply_phase(double phi, const TwoModeState& state, Mode mode) {
  TwoModeState out = state;
  const auto& c = state.cutoff;
  for (int na = 0; na < c.dim(); ++na)
    for (int nb = 0; nb < c.dim(); ++nb)
      out.amplitudes(c.index(na, nb)) *= std::polar(1.0, -phi * (mode == Mode::a ? na : nb));
  return out;
}

LossChannel::LossChannel(double kappa, FockCutoff cutoff, Mode mode)
    : kappa_(kappa), cutoff_(cutoff), mode_(mode) {
  if (!std::isfinite(kappa) || kappa < 0) throw std::domain_error("loss exponent kappa must be finite and >= 0");
  const int d = cutoff.dim();
  if (kappa == 0) {
    kraus_.push_back(Eigen::MatrixXcd::Identity(d, d));
    return;
  }
  // Dilation on (probe, ancilla) with the probe in slot a of a scratch
  // two-mode space: U^dag p U = cos(theta) p + sin(theta) c.
  const double theta_loss = std::acos(std::exp(-kappa));
  const auto spec = splitter_spectrum(cutoff);
  kraus_.assign(d, Eigen::MatrixXcd::Zero(d, d));
  for (int n = 0; n < d; ++n) {
    Eigen::VectorXcd input = Eigen::VectorXcd::Zero(cutoff.two_mode_dim());
    input(cutoff.index(n, 0)) = 1.0;
    const Eigen::VectorXcd column = apply_splitter(*spec, theta_loss, input);
    for (int m = 0; m < d; ++m)
      for (int k = 0; k < d; ++k) kraus_[k](m, n) = column(cutoff.index(m, k));
  }
}

std::vector<TwoModeState> LossChannel::apply(const TwoModeState& state) const {
  if (!(state.cutoff == cutoff_)) throw std::invalid_argument("loss channel and state use different cutoffs");
  const int d = cutoff_.dim();
  const Eigen::Map<const RowMajorMatrixXcd> psi(state.amplitudes.data(), d, d);  // psi(n_a, n_b)
  std::vector<TwoModeState> branches;
  for (const auto& k : kraus_) {
    RowMajorMatrixXcd branch = mode_ == Mode::b ? RowMajorMatrixXcd(psi * k.transpose()) : RowMajorMatrixXcd(k * psi);
    if (branch.squaredNorm() == 0) continue;
    branches.push_back({Eigen::Map<const Eigen::VectorXcd>(branch.data(), branch.size()), cutoff_});
  }
  return branches;
}

Eigen::MatrixXcd LossChannel::completeness() const {
  const int d = cutoff_.dim();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  return sum;
}

LossChannel loss_channel(double kappa, FockCutoff cutoff, Mode mode) { return LossChannel(kappa, cutoff, mode); }

namespace {

TwoModeState prepare_input(const InterferometerParams<double>& params, FockCutoff cutoff, double tail_tol) {
  Eigen::VectorXcd vacuum = Eigen::VectorXcd::Zero(cutoff.dim());
  vacuum(0) = 1.0;
  return TwoModeState::product(coherent_state(params.alpha, cutoff, tail_tol), vacuum);
}

}  // namespace

TwoModeState evolve_lossless(const InterferometerParams<double>& params, FockCutoff cutoff,
                             const SimulationOptions& options) {
  params.validate();
  if (params.kappa != 0) throw std::invalid_argument("evolve_lossless requires kappa = 0");
  auto state = apply_beam_splitter(params.theta1, prepare_input(params, cutoff, options.tail_tol));
  state = apply_phase(params.phi, state, kProbeMode);
  return apply_beam_splitter(params.theta2, state);
}

SimulationResult simulate(const InterferometerParams<double>& params, FockCutoff cutoff,
                          const SimulationOptions& options) {
  params.validate();
  SimulationResult result;

  const auto after_first = apply_beam_splitter(params.theta1, prepare_input(params, cutoff, options.tail_tol));
  result.probe_intensity = after_first.mean_number(kProbeMode);
  const double probe_sq = after_first.mean_number_squared(kProbeMode);
  result.probe_std = std::sqrt(std::max(0.0, probe_sq - result.probe_intensity * result.probe_intensity));
  result.edge_mass = after_first.edge_mass();

  const auto after_mirror = apply_phase(params.phi, after_first, kProbeMode);
  std::vector<TwoModeState> branches;
  if (params.kappa > 0)
    branches = loss_channel(params.kappa, cutoff, kProbeMode).apply(after_mirror);
  else
    branches.push_back(after_mirror);

  double first_moment = 0, second_moment = 0, output_edge = 0;
  for (const auto& branch : branches) {
    const auto out = apply_beam_splitter(params.theta2, branch);
    output_edge += out.edge_mass();
    for (int na = 0; na < cutoff.dim(); ++na)
      for (int nb = 0; nb < cutoff.dim(); ++nb) {
        const double p = std::norm(out.amplitudes(cutoff.index(na, nb)));
        const double o = nb - na;
        first_moment += p * o;
        second_moment += p * o * o;
      }
  }
  result.mean_O = first_moment;
  result.std_O = std::sqrt(std::max(0.0, second_moment - first_moment * first_moment));
  result.edge_mass = std::max(result.edge_mass, output_edge);
  result.truncation_warning = result.edge_mass >= options.edge_tol;
  return result;
}

}  // namespace uil::fock
