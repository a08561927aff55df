#include "uil/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "uil/analytic_model.hpp"

namespace uil {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
constexpr double kInvPhi = 0.6180339887498949;  // 1 / golden ratio

struct Axis {
  double lo;
  double hi;
};

// Free coordinates of a regime; coordinate 0 is always the angle that sets
// the probe-arm light (theta1).
class SearchSpace {
 public:
  SearchSpace(Objective objective, const ConstraintRegime& regime) : objective_(objective), regime_(regime) {
    axes_.push_back({0, kHalfPi});
    if (regime.kind == RegimeKind::free) axes_.push_back({0, kHalfPi});
    if (!regime.phi) axes_.push_back({0, std::numbers::pi});
  }

  std::size_t dims() const { return axes_.size(); }
  const Axis& axis(std::size_t i) const { return axes_[i]; }

  InterferometerParams<double> params(const std::vector<double>& x) const {
    InterferometerParams<double> p;
    p.theta1 = x[0];
    switch (regime_.kind) {
      case RegimeKind::free: p.theta2 = x[1]; break;
      case RegimeKind::equal_splitters: p.theta2 = x[0]; break;
      case RegimeKind::fixed_mixer: p.theta2 = std::numbers::pi / 4; break;
    }
    p.phi = regime_.phi ? *regime_.phi : x.back();
    p.kappa = regime_.kappa;
    p.eta = regime_.eta;
    p.alpha = regime_.alpha;
    return p;
  }

  double operator()(const std::vector<double>& x) {
    ++evaluations;
    const auto p = params(x);
    return objective_ == Objective::rho_intensity ? rho_intensity(p) : rho_fluctuation(p);
  }

  std::size_t evaluations = 0;

 private:
  Objective objective_;
  ConstraintRegime regime_;
  std::vector<Axis> axes_;
};

// Maximises f on [lo, hi] until the bracket is narrower than tol.
template <typename F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol, double* width) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo >= tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  if (width) *width = hi - lo;
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Cyclic coordinate golden-section refinement around x, skipping `pinned`
// coordinates. Only accepts moves that do not lower the value.
double refine(SearchSpace& space, std::vector<double>& x, double value, const std::vector<double>& step,
              const std::vector<bool>& pinned, double tol, int max_sweeps, double& bracket) {
  bracket = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0;
    for (std::size_t i = 0; i < space.dims(); ++i) {
      if (pinned[i]) continue;
      const double half = std::max(step[i] * std::ldexp(1.0, -sweep), 4 * tol);
      const double lo = std::max(space.axis(i).lo, x[i] - half);
      const double hi = std::min(space.axis(i).hi, x[i] + half);
      auto along = [&](double t) {
        auto y = x;
        y[i] = t;
        return space(y);
      };
      double width = 0;
      const auto [arg, val] = golden_section_max(along, lo, hi, tol, &width);
      bracket = std::max(bracket, width);
      if (val >= value) {
        moved = std::max(moved, std::abs(arg - x[i]));
        x[i] = arg;
        value = val;
      }
    }
    if (sweep > 0 && moved < tol) break;
  }
  return value;
}

}  // namespace

void ConstraintRegime::validate() const {
  if (!std::isfinite(kappa) || kappa < 0) throw std::domain_error("regime kappa must be finite and >= 0");
  if (!(eta > 0 && eta <= 1)) throw std::domain_error("regime eta must lie in (0, 1]");
  if (phi && !std::isfinite(*phi)) throw std::domain_error("regime phi must be finite");
}

OptimumReport optimize(Objective objective, const ConstraintRegime& regime, double tol,
                       const OptimizerOptions& options) {
  if (!(tol > 0)) throw std::domain_error("optimizer tolerance must be > 0");
  regime.validate();
  SearchSpace space(objective, regime);
  const std::size_t dims = space.dims();
  const int n = dims >= 3 ? options.grid_points_3d : options.grid_points;
  if (n < 3) throw std::domain_error("optimizer grid needs at least 3 points per axis");

  std::vector<double> step(dims);
  for (std::size_t i = 0; i < dims; ++i) step[i] = (space.axis(i).hi - space.axis(i).lo) / (n - 1);
  auto node = [&](std::size_t i, int k) { return k == n - 1 ? space.axis(i).hi : space.axis(i).lo + k * step[i]; };

  // Lexicographic scan, coordinate 0 outermost; strict '>' keeps the first tie.
  std::vector<int> idx(dims, 0), best_idx(dims, 0);
  std::vector<double> x(dims);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t i = 0; i < dims; ++i) x[i] = node(i, idx[i]);
    const double v = space(x);
    if (v > best) {
      best = v;
      best_idx = idx;
    }
    std::size_t i = dims;
    while (i > 0 && ++idx[i - 1] == n) idx[--i] = 0;
    if (i == 0) break;
  }

  OptimumReport report;
  report.objective = objective;
  report.regime = regime;
  report.grid_best = best;

  std::vector<double> at(dims);
  for (std::size_t i = 0; i < dims; ++i) at[i] = node(i, best_idx[i]);

  auto finish = [&](const std::vector<double>& y, double value, OptimumKind kind, double bracket) {
    const auto p = space.params(y);
    report.theta1 = p.theta1;
    report.theta2 = p.theta2;
    report.phi = p.phi;
    report.value = value;
    report.kind = kind;
    report.bracket_width = bracket;
    report.evaluations = space.evaluations;
    return report;
  };

  double bracket = 0;
  std::vector<bool> pinned(dims, false);

  if (best_idx[0] <= 1) {
    // Best cell touches theta1 = 0: probe the limit along a geometric sequence.
    std::array<double, 4> probe{};
    auto y = at;
    for (int j = 0; j < 4; ++j) {
      y[0] = step[0] * std::pow(1e-3, j);
      probe[j] = space(y);
    }
    const bool increasing = std::is_sorted(probe.begin(), probe.end());
    if (std::isinf(probe[3]) || (increasing && probe[3] > 1e3 * std::max(probe[0], 1e-300))) {
      y[0] = 0;
      return finish(y, std::numeric_limits<double>::infinity(), OptimumKind::unbounded, 0);
    }

    auto interior = at;
    const double interior_value = refine(space, interior, best, step, pinned, tol, options.max_refinement_sweeps, bracket);

    // Limit value with theta1 -> 0, other coordinates refined at the boundary.
    auto edge = at;
    edge[0] = step[0] * 1e-9;
    pinned[0] = true;
    double edge_bracket = 0;
    double edge_value = refine(space, edge, space(edge), step, pinned, tol, options.max_refinement_sweeps, edge_bracket);
    edge[0] = 0;
    edge_value = std::max(edge_value, space(edge));

    if (edge_value >= interior_value) return finish(edge, edge_value, OptimumKind::boundary_supremum, edge_bracket);
    return finish(interior, interior_value, OptimumKind::interior, bracket);
  }

  const double value = refine(space, at, best, step, pinned, tol, options.max_refinement_sweeps, bracket);
  return finish(at, std::max(value, best), OptimumKind::interior, bracket);
}

double working_point(const InterferometerParams<double>& params, double tol) {
  params.validate();
  const double sensitivity = std::abs(params.alpha) * std::abs(std::sin(2 * params.theta1) * std::sin(2 * params.theta2));
  if (sensitivity < 1e-15) throw NoSensitivityError("interferometer has no phase sensitivity at these mixing angles");
  auto resolving_power = [&](double phi) {
    auto p = params;
    p.phi = phi;
    return 1 / delta_phi(p);
  };
  return golden_section_max(resolving_power, 0.0, std::numbers::pi, tol, nullptr).first;
}

std::string to_string(Objective objective) {
  return objective == Objective::rho_intensity ? "rho_intensity" : "rho_fluctuation";
}

std::string to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::free: return "free";
    case RegimeKind::equal_splitters: return "equal_splitters";
    case RegimeKind::fixed_mixer: return "fixed_mixer";
  }
  return "unknown";
}

std::string to_string(OptimumKind kind) {
  switch (kind) {
    case OptimumKind::interior: return "interior";
    case OptimumKind::boundary_supremum: return "boundary_supremum";
    case OptimumKind::unbounded: return "unbounded";
  }
  return "unknown";
}

}  // namespace uil
