#include "uil/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

namespace uil::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (;;) {
    const auto next = s.find(sep, pos);
    parts.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

}  // namespace

double SweepAxis::value(int k) const {
  const double u = k == steps - 1 ? stop : start + (stop - start) * double(k) / double(steps - 1);
  if (scale == AxisScale::transmission) return u >= 1 ? 0.0 : -std::log(u);
  return u;
}

SweepAxis parse_axis(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 4 && parts.size() != 5)
    throw UsageError("axis must be name:start:stop:steps[:transmission], got '" + std::string(spec) + "'");
  SweepAxis axis;
  axis.parameter = trim(parts[0]);
  try {
    axis.start = parse_number(trim(parts[1]));
    axis.stop = parse_number(trim(parts[2]));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("axis bounds: ") + e.what());
  }
  const auto steps = trim(parts[3]);
  const auto res = std::from_chars(steps.data(), steps.data() + steps.size(), axis.steps);
  if (res.ec != std::errc{} || res.ptr != steps.data() + steps.size())
    throw UsageError("axis step count must be an integer, got '" + steps + "'");
  if (parts.size() == 5) {
    const auto scale = trim(parts[4]);
    if (scale == "transmission")
      axis.scale = AxisScale::transmission;
    else if (scale != "linear")
      throw UsageError("unknown axis scale '" + scale + "'");
  }
  return axis;
}

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names{"theta1", "theta2", "phi", "kappa", "eta", "alpha_re", "alpha_im"};
  return names;
}

const std::vector<std::string>& parameter_columns() {
  static const std::vector<std::string> names{"theta1", "theta2", "phi", "kappa", "transmission", "eta", "alpha_abs"};
  return names;
}

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> names{"mean_O",         "std_O",         "delta_phi",       "intensity_probe",
                                              "std_intensity_probe", "rho_intensity", "rho_fluctuation", "visibility"};
  return names;
}

void set_parameter(InterferometerParams<double>& p, std::string_view name, double value) {
  if (name == "theta1") p.theta1 = value;
  else if (name == "theta2") p.theta2 = value;
  else if (name == "phi") p.phi = value;
  else if (name == "kappa") p.kappa = value;
  else if (name == "eta") p.eta = value;
  else if (name == "alpha_re") p.alpha.real(value);
  else if (name == "alpha_im") p.alpha.imag(value);
  else throw UsageError("unknown parameter '" + std::string(name) + "'");
}

void SweepGrid::validate() const {
  if (axes.empty()) throw UsageError("sweep needs at least one axis");
  std::set<std::string> seen;
  for (const auto& axis : axes) {
    const auto& known = sweepable_parameters();
    if (std::find(known.begin(), known.end(), axis.parameter) == known.end())
      throw UsageError("cannot sweep unknown parameter '" + axis.parameter + "'");
    if (!seen.insert(axis.parameter).second) throw UsageError("parameter '" + axis.parameter + "' swept twice");
    if (fixed.count(axis.parameter)) throw UsageError("parameter '" + axis.parameter + "' is both fixed and swept");
    if (axis.steps < 2) throw UsageError("axis '" + axis.parameter + "' needs at least 2 steps");
    if (!std::isfinite(axis.start) || !std::isfinite(axis.stop))
      throw UsageError("axis '" + axis.parameter + "' bounds must be finite");
    if (axis.scale == AxisScale::transmission) {
      if (axis.parameter != "kappa") throw UsageError("transmission scale only applies to kappa");
      if (!(axis.start > 0 && axis.start <= 1 && axis.stop > 0 && axis.stop <= 1))
        throw UsageError("transmission bounds must lie in (0, 1]");
    }
  }
  for (const auto& c : columns) {
    const auto& known = metric_columns();
    if (std::find(known.begin(), known.end(), c) == known.end()) throw UsageError("unknown output column '" + c + "'");
  }
}

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= std::size_t(a.steps);
  return n;
}

SweepGrid SweepGrid::loss_surface_preset() {
  SweepGrid grid;
  grid.base.theta2 = std::numbers::pi / 4;
  grid.base.phi = std::numbers::pi / 2;
  grid.axes.push_back({"kappa", 0.05, 1.0, 40, AxisScale::transmission});
  grid.axes.push_back({"theta1", std::numbers::pi / 120, std::numbers::pi / 2, 60, AxisScale::linear});
  grid.columns = {"rho_fluctuation"};
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid) {
  grid.validate();
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  std::vector<int> idx(grid.axes.size(), 0);
  for (;;) {
    auto p = grid.base;
    for (std::size_t i = 0; i < idx.size(); ++i) set_parameter(p, grid.axes[i].parameter, grid.axes[i].value(idx[i]));
    try {
      rows.push_back({p, performance_metrics(p)});
    } catch (const std::domain_error& e) {
      throw UsageError(std::string("invalid grid point: ") + e.what());
    }
    std::size_t i = idx.size();
    while (i > 0 && ++idx[i - 1] == grid.axes[i - 1].steps) idx[--i] = 0;
    if (i == 0) break;
  }
  return rows;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return x;
}

double column_value(const SweepRow& row, std::string_view column) {
  const auto& p = row.params;
  const auto& m = row.metrics;
  if (column == "theta1") return p.theta1;
  if (column == "theta2") return p.theta2;
  if (column == "phi") return p.phi;
  if (column == "kappa") return p.kappa;
  if (column == "transmission") return p.transmission();
  if (column == "eta") return p.eta;
  if (column == "alpha_abs") return std::abs(p.alpha);
  if (column == "mean_O") return m.mean_O;
  if (column == "std_O") return m.std_O;
  if (column == "delta_phi") return m.delta_phi;
  if (column == "intensity_probe") return m.intensity_probe;
  if (column == "std_intensity_probe") return m.std_intensity_probe;
  if (column == "rho_intensity") return m.rho_intensity;
  if (column == "rho_fluctuation") return m.rho_fluctuation;
  if (column == "visibility") return m.visibility;
  throw UsageError("unknown column '" + std::string(column) + "'");
}

std::string to_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& metric_cols) {
  std::vector<std::string> cols = parameter_columns();
  cols.insert(cols.end(), metric_cols.begin(), metric_cols.end());
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ',';
      out += format_number(column_value(row, cols[i]));
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

nlohmann::ordered_json to_json(const std::vector<SweepRow>& rows, const std::vector<std::string>& metric_cols) {
  std::vector<std::string> cols = parameter_columns();
  cols.insert(cols.end(), metric_cols.begin(), metric_cols.end());
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (const auto& c : cols) obj[c] = json_number(column_value(row, c));
    out.push_back(std::move(obj));
  }
  return out;
}

nlohmann::ordered_json metrics_record(const InterferometerParams<double>& params,
                                      const PerformanceMetrics<double>& metrics) {
  const SweepRow row{params, metrics};
  nlohmann::ordered_json obj;
  for (const auto& c : parameter_columns()) obj[c] = json_number(column_value(row, c));
  obj["alpha_re"] = params.alpha.real();
  obj["alpha_im"] = params.alpha.imag();
  for (const auto& c : metric_columns()) obj[c] = json_number(column_value(row, c));
  return obj;
}

nlohmann::ordered_json params_json(const InterferometerParams<double>& p) {
  return {{"theta1", p.theta1}, {"theta2", p.theta2}, {"phi", p.phi},           {"kappa", p.kappa},
          {"eta", p.eta},       {"alpha_re", p.alpha.real()}, {"alpha_im", p.alpha.imag()}};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

nlohmann::ordered_json RunManifest::to_json() const {
  return {{"tool", "uil"},
          {"tool_version", tool_version},
          {"timestamp", timestamp},
          {"output", output_path},
          {"checksum", {{"algorithm", "sha256"}, {"value", output_sha256}}},
          {"resolved", resolved}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest write_with_manifest(const std::string& path, const std::string& data, nlohmann::ordered_json resolved) {
  auto write = [](const std::string& file, const std::string& contents) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + file + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing '" + file + "'");
  };
  RunManifest manifest{UIL_VERSION, std::move(resolved), utc_timestamp(), path, sha256_hex(data)};
  write(path, data);
  write(path + ".manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty())
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '-', '_');
    entries[key] = value;
  }
  return entries;
}

}  // namespace uil::cli
