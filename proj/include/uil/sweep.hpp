#pragma once

// Parameter sweeps, flat-file serialization and run manifests for the CLI.

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uil/analytic_model.hpp"
#include "uil/params.hpp"

namespace uil::cli {

/// Exit codes of the `uil` tool.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitTruncation = 4,
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AxisScale {
  linear,        // evenly spaced in the parameter itself
  transmission,  // kappa axis, evenly spaced in exp(-kappa); start/stop are transmissions
};

struct SweepAxis {
  std::string parameter;
  double start = 0;
  double stop = 0;
  int steps = 2;
  AxisScale scale = AxisScale::linear;

  /// Parameter value at node k (0 <= k < steps). The last node is `stop` exactly.
  double value(int k) const;
};

/// "name:start:stop:steps" or "name:start:stop:steps:transmission".
SweepAxis parse_axis(std::string_view spec);

/// Parameters accepted on sweep axes and as fixed values.
const std::vector<std::string>& sweepable_parameters();

/// theta1, theta2, phi, kappa, transmission, eta, alpha_abs.
const std::vector<std::string>& parameter_columns();

/// PerformanceMetrics field names in declaration order.
const std::vector<std::string>& metric_columns();

void set_parameter(InterferometerParams<double>& params, std::string_view name, double value);

struct SweepGrid {
  std::vector<SweepAxis> axes;
  InterferometerParams<double> base;     // values of all non-swept parameters
  std::set<std::string> fixed;           // parameters the caller pinned explicitly
  std::vector<std::string> columns = metric_columns();

  /// Throws UsageError on a malformed grid.
  void validate() const;
  std::size_t size() const;

  /// theta2 = pi/4, phi = pi/2; transmission in [0.05, 1] (40 nodes) x theta1
  /// in [pi/120, pi/2] (60 nodes, so pi/4 is node 30); column rho_fluctuation.
  static SweepGrid loss_surface_preset();
};

struct SweepRow {
  InterferometerParams<double> params;
  PerformanceMetrics<double> metrics;
};

/// Row-major over the axes in declared order (first axis outermost).
std::vector<SweepRow> run_sweep(const SweepGrid& grid);

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double x);

/// Parses a number written by format_number.
double parse_number(std::string_view text);

double column_value(const SweepRow& row, std::string_view column);

std::string to_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& metric_cols);

nlohmann::ordered_json to_json(const std::vector<SweepRow>& rows, const std::vector<std::string>& metric_cols);

/// Flat JSON object with every parameter and metric column of one point.
nlohmann::ordered_json metrics_record(const InterferometerParams<double>& params,
                                      const PerformanceMetrics<double>& metrics);

/// JSON number, or the strings "inf" / "-inf" / "nan".
nlohmann::ordered_json json_number(double x);

nlohmann::ordered_json params_json(const InterferometerParams<double>& params);

std::string sha256_hex(std::string_view data);

struct RunManifest {
  std::string tool_version;
  nlohmann::ordered_json resolved;  // full resolved configuration
  std::string timestamp;            // UTC, ISO 8601
  std::string output_path;
  std::string output_sha256;

  nlohmann::ordered_json to_json() const;
};

std::string utc_timestamp();

/// Writes `data` to `path` and its manifest to `path + ".manifest.json"`.
/// Throws IoError when either file cannot be written.
RunManifest write_with_manifest(const std::string& path, const std::string& data, nlohmann::ordered_json resolved);

/// "key = value" lines; '#' starts a comment. Keys are normalised to use '_'.
/// Throws UsageError on malformed lines, IoError if the file cannot be read.
std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace uil::cli
