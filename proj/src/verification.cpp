#include "uil/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "uil/analytic_model.hpp"

namespace uil {

double Deviation::max() const { return std::max({mean_O, std_O, probe_intensity, probe_std}); }

std::vector<InterferometerParams<double>> sample_parameter_points(std::complex<double> alpha, int samples,
                                                                  std::uint64_t seed) {
  if (samples < 0) throw std::domain_error("sample count must be >= 0");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };  // [0, 1)
  std::vector<InterferometerParams<double>> points;
  points.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    InterferometerParams<double> p;
    p.theta1 = uniform() * std::numbers::pi / 2;
    p.theta2 = uniform() * std::numbers::pi / 2;
    p.phi = uniform() * 2 * std::numbers::pi;
    p.kappa = uniform();
    p.alpha = alpha;
    points.push_back(p);
  }
  return points;
}

VerifyReport verify_against_oracle(const VerifyConfig& config) {
  if (config.tol <= 0) throw std::domain_error("verification tolerance must be > 0");
  const fock::FockCutoff cutoff(config.cutoff);
  fock::coherent_state(config.alpha, cutoff);  // tail check up front

  VerifyReport report;
  report.config = config;
  auto& dev = report.deviation;
  auto check = [&](const InterferometerParams<double>& p) {
    const auto oracle = fock::simulate(p, cutoff);
    const auto probe = probe_arm_stats(p);
    dev.mean_O = std::max(dev.mean_O, std::abs(oracle.mean_O - expectation_O(p)));
    dev.std_O = std::max(dev.std_O, std::abs(oracle.std_O - std_O(p)));
    dev.probe_intensity = std::max(dev.probe_intensity, std::abs(oracle.probe_intensity - probe.intensity));
    dev.probe_std = std::max(dev.probe_std, std::abs(oracle.probe_std - probe.std_intensity));
    report.max_edge_mass = std::max(report.max_edge_mass, oracle.edge_mass);
    report.truncation_warning = report.truncation_warning || oracle.truncation_warning;
    return oracle;
  };

  for (auto p : sample_parameter_points(config.alpha, config.samples, config.seed)) {
    check(p);
    p.kappa = 0;
    const auto lossless = check(p);
    report.lossless_std_deviation =
        std::max(report.lossless_std_deviation, std::abs(lossless.std_O - std::abs(config.alpha)));
  }
  report.passed = dev.max() < config.tol && report.lossless_std_deviation < config.tol;
  return report;
}

}  // namespace uil
