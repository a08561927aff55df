// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "cli_runner.hpp"
#include "uil/analytic_model.hpp"
#include "uil/optimizer.hpp"
#include "uil/sweep.hpp"
#include "uil/verification.hpp"

namespace {

using namespace uil;
using P = InterferometerParams<double>;
using Clock = std::chrono::steady_clock;

constexpr double pi = std::numbers::pi;

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const char* id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0) o.require(elapsed < budget_s, "runtime over " + cli::format_number(budget_s) + " s");
  if (!o.pass) ++failures;
  std::printf("[%s] %s %s (%.3f s) %s\n", o.pass ? "PASS" : "FAIL", id, title, elapsed, o.detail.str().c_str());
  std::fflush(stdout);
}

P balanced(double alpha) { return P{pi / 4, pi / 4, pi / 2, 0, 1, alpha}; }

// Explicit 53-bit mapping so the point set does not depend on the standard library.
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * ((rng() >> 11) * 0x1p-53); }

P random_point(std::mt19937_64& rng, bool lossy) {
  P p;
  p.theta1 = uniform(rng, 0, pi / 2);
  p.theta2 = uniform(rng, 0, pi / 2);
  p.phi = uniform(rng, 0, 2 * pi);
  p.kappa = lossy ? uniform(rng, 0, 2) : 0;
  p.alpha = std::polar(uniform(rng, 0.2, 3), uniform(rng, 0, 2 * pi));
  return p;
}

}  // namespace

int main() {
  criterion("AC1", "balanced resolution is 1/|alpha|", 1.0, [](Outcome& o) {
    double worst = 0;
    for (double a : {0.5, 1.0, 2.0}) worst = std::max(worst, rel_err(delta_phi(balanced(a)), 1 / a));
    o.detail << "max rel err " << worst;
    o.require(worst <= 1e-12, "relative error");
  });

  criterion("AC2", "balanced ratios 2/|alpha| and sqrt 2", 1.0, [](Outcome& o) {
    double worst = 0;
    for (double a : {0.5, 1.0, 2.0}) {
      worst = std::max(worst, std::abs(rho_intensity(balanced(a)) - 2 / a));
      worst = std::max(worst, std::abs(rho_fluctuation(balanced(a)) - std::sqrt(2.0)));
    }
    o.detail << "max abs err " << worst;
    o.require(worst <= 1e-12, "tolerance");
  });

  criterion("AC3", "equal-splitter optimum", 5.0, [](Outcome& o) {
    ConstraintRegime regime;
    regime.kind = RegimeKind::equal_splitters;
    const auto r = optimize(Objective::rho_fluctuation, regime, 1e-10);
    const double exact = 8 * std::sqrt(3.0) / 9;
    const double arg_err = std::abs(r.theta1 - std::atan(1 / std::sqrt(2.0)));
    const double gain = r.value / std::sqrt(2.0);
    o.detail << "theta* " << cli::format_number(r.theta1) << " value " << cli::format_number(r.value) << " gain "
             << gain;
    o.require(r.kind == OptimumKind::interior, "interior optimum");
    o.require(arg_err < 1e-6, "argmax");
    o.require(std::abs(r.value - exact) < 1e-9, "value");
    o.require(gain >= 1.088 && gain <= 1.090, "gain over balanced");
  });

  criterion("AC4", "homodyne-like limit and its expansion", 0, [](Outcome& o) {
    auto rho = [](double t1) { return rho_fluctuation(P{t1, pi / 4, pi / 2, 0, 1, 1}); };
    const double at_small = std::abs(rho(1e-4) - 2);
    double worst_margin = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 2000; ++i) {
      const double t = 0.2 * i / 2000;
      worst_margin = std::max(worst_margin, std::abs(rho(t) - (2 - t * t)) - std::pow(t, 4));
    }
    o.detail << "|rho(1e-4) - 2| = " << at_small << ", max(|rho - (2 - t^2)| - t^4) = " << worst_margin;
    o.require(at_small < 1e-7, "limit");
    o.require(worst_margin < 0, "expansion");
  });

  criterion("AC5", "lossy forms reduce to lossless ones at zero loss", 0, [](Outcome& o) {
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_point(rng, false);
      const double a = delta_phi_lossy(p), b = delta_phi_lossless(p);
      if (std::isinf(a) || std::isinf(b)) {
        o.require(a == b, "both infinite");
        continue;
      }
      worst = std::max(worst, rel_err(a, b));
    }
    double worst_mixer = 0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = pi / 2 * i / 1000;
      worst_mixer = std::max(worst_mixer, std::abs(rho_fluctuation_balanced_mixer(t, 0.0) - 2 * std::cos(t)));
    }
    o.detail << "resolution rel err " << worst << ", mixer-limit abs err " << worst_mixer;
    o.require(worst <= 1e-12, "resolution identity");
    o.require(worst_mixer <= 1e-12, "mixer identity");
  });

  criterion("AC6", "Fock-space oracle agrees with closed forms", 60.0, [](Outcome& o) {
    VerifyConfig config;
    config.alpha = 1;
    config.cutoff = 30;
    config.samples = 50;
    config.seed = 7;
    config.tol = 1e-8;
    const auto r = verify_against_oracle(config);
    o.detail << "library max dev " << r.deviation.max() << ", |std_O - |alpha|| " << r.lossless_std_deviation;
    o.require(r.passed, "library verify");
    o.require(r.lossless_std_deviation < 1e-8, "lossless std_O");

    const auto cli = testing::run_cli("verify --alpha 1 --cutoff 30 --samples 50 --seed 7 --tol 1e-8");
    o.require(cli.exit_code == 0, "CLI exit code " + std::to_string(cli.exit_code));
    if (cli.exit_code == 0) {
      const auto j = nlohmann::json::parse(cli.out);
      o.detail << ", CLI max dev " << j["max_deviation"].get<double>();
      o.require(j["max_deviation"].get<double>() < 1e-8, "CLI deviation");
    }
  });

  criterion("AC7", "phase gradient matches central differences", 0, [](Outcome& o) {
    std::mt19937_64 rng(99);
    const double h = 1e-6;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      auto p = random_point(rng, true);
      const double g = phase_gradient_O(p);
      auto plus = p, minus = p;
      plus.phi += h;
      minus.phi -= h;
      const double fd = (expectation_O(plus) - expectation_O(minus)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g) / std::abs(g));
    }
    o.detail << "max rel err " << worst;
    o.require(worst < 1e-6, "relative error");
  });

  criterion("AC8", "loss-surface preset properties", 5.0, [](Outcome& o) {
    const auto grid = cli::SweepGrid::loss_surface_preset();
    const auto rows = cli::run_sweep(grid);
    const int nt = grid.axes[0].steps, nk = grid.axes[1].steps;
    auto at = [&](int t, int k) -> const cli::SweepRow& { return rows[std::size_t(t) * nk + k]; };

    int violations = 0;
    for (int k = 0; k < nk; ++k)
      for (int t = 1; t < nt; ++t)
        if (at(t - 1, k).metrics.rho_fluctuation > at(t, k).metrics.rho_fluctuation) ++violations;

    double corner = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < nk; ++k)
      if (at(nt - 1, k).params.kappa == 0 && std::abs(at(nt - 1, k).params.theta1 - pi / 4) < 1e-12)
        corner = at(nt - 1, k).metrics.rho_fluctuation;

    double steepest = 0;
    for (int k = 1; k < nk && at(nt - 1, k).params.theta1 < 0.1; ++k) {
      const auto &a = at(nt - 1, k - 1), &b = at(nt - 1, k);
      steepest = std::max(steepest, std::abs((b.metrics.rho_fluctuation - a.metrics.rho_fluctuation) /
                                             (b.params.theta1 - a.params.theta1)));
    }
    const double h = 1e-6;
    for (int i = 0; i <= 1000; ++i) {
      const double t = h + (0.1 - 2 * h) * i / 1000;
      const double d = (rho_fluctuation(P{t + h, pi / 4, pi / 2, 0, 1, 1}) -
                        rho_fluctuation(P{t - h, pi / 4, pi / 2, 0, 1, 1})) / (2 * h);
      steepest = std::max(steepest, std::abs(d));
    }
    o.detail << rows.size() << " rows, " << violations << " monotonicity violations, corner " << corner
             << ", max |d rho/d theta1| below 0.1 = " << steepest;
    o.require(violations == 0, "monotone in loss");
    o.require(std::abs(corner - std::sqrt(2.0)) < 1e-12, "balanced corner");
    o.require(steepest < 0.2, "weak gradient");
  });

  criterion("AC9", "detector efficiency scales the fluctuation ratio", 0, [](Outcome& o) {
    std::mt19937_64 rng(5);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      auto p = random_point(rng, true);
      const double ideal = rho_fluctuation(p);
      for (double eta : {0.25, 0.5, 0.9}) {
        p.eta = eta;
        worst = std::max(worst, std::abs(rho_fluctuation(p) - eta * ideal));
      }
    }
    o.detail << "max abs err " << worst;
    o.require(worst <= 1e-12, "tolerance");
  });

  criterion("AC10", "repeated sweeps are byte-identical", 0, [](Outcome& o) {
    const auto dir = testing::scratch_dir("acceptance");
    const auto a = dir / "first.csv", b = dir / "second.csv";
    const int ra = testing::run_cli("sweep --output " + a.string()).exit_code;
    const int rb = testing::run_cli("sweep --output " + b.string()).exit_code;
    o.require(ra == 0 && rb == 0, "CLI exit codes");
    const auto da = testing::slurp(a), db = testing::slurp(b);
    o.detail << da.size() << " bytes each";
    o.require(!da.empty() && da == db, "identical bytes");
    const auto ma = nlohmann::json::parse(testing::slurp(a.string() + ".manifest.json"));
    const auto mb = nlohmann::json::parse(testing::slurp(b.string() + ".manifest.json"));
    o.require(ma["checksum"] == mb["checksum"] && ma["resolved"] == mb["resolved"], "manifests agree");
    std::filesystem::remove_all(dir);
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
