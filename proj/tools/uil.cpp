// uil: closed-form metrics, sweeps, optimisation and oracle verification for
// an intensity-unbalanced two-path interferometer.
//
// Exit codes: 0 success, 1 verification failure, 2 usage, 3 I/O, 4 truncation.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uil/analytic_model.hpp"
#include "uil/fock_engine.hpp"
#include "uil/optimizer.hpp"
#include "uil/sweep.hpp"
#include "uil/verification.hpp"

namespace {

using namespace uil;
using namespace uil::cli;
using json = nlohmann::ordered_json;

// Interferometer point flags with precedence flag > config file > default.
struct PointFlags {
  std::map<std::string, double> values{{"theta1", std::numbers::pi / 4}, {"theta2", std::numbers::pi / 4},
                                       {"phi", std::numbers::pi / 2},    {"kappa", 0.0},
                                       {"eta", 1.0},                     {"alpha_re", 1.0},
                                       {"alpha_im", 0.0}};
  std::map<std::string, CLI::Option*> options;
  double alpha_shortcut = 1.0;
  CLI::Option* alpha_option = nullptr;
  std::string config_path;
  std::set<std::string> explicitly_set;

  void add(CLI::App* app, const std::vector<std::string>& names) {
    for (const auto& name : names) {
      std::string flag = "--" + name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      options[name] = app->add_option(flag, values[name], name + " (radians for angles)");
    }
    if (options.count("alpha_re")) {
      alpha_option = app->add_option("--alpha", alpha_shortcut, "real coherent amplitude (same as --alpha-re)");
      alpha_option->excludes(options["alpha_re"]);
    }
    app->add_option("--config", config_path, "key = value file; flags override it")->check(CLI::ExistingFile);
  }

  InterferometerParams<double> resolve() {
    std::map<std::string, std::string> config;
    if (!config_path.empty()) config = parse_config_file(config_path);
    if (config.count("alpha") && !config.count("alpha_re")) config["alpha_re"] = config["alpha"];
    if (alpha_option && alpha_option->count()) {
      values["alpha_re"] = alpha_shortcut;
      explicitly_set.insert("alpha_re");
    }
    InterferometerParams<double> p;
    for (auto& [name, value] : values) {
      const auto opt = options.find(name);
      if (opt != options.end() && opt->second->count()) {
        explicitly_set.insert(name);
      } else if (const auto it = config.find(name); it != config.end() && !explicitly_set.count(name)) {
        try {
          value = parse_number(it->second);
        } catch (const std::invalid_argument&) {
          throw UsageError("config value for '" + name + "' is not a number: " + it->second);
        }
        explicitly_set.insert(name);
      }
      set_parameter(p, name, value);
    }
    try {
      p.validate();
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

const std::vector<std::string> kAllPointFlags{"theta1", "theta2", "phi", "kappa", "eta", "alpha_re", "alpha_im"};

void emit(const std::string& output, const std::string& data, json resolved) {
  if (output.empty()) {
    std::cout << data;
    return;
  }
  write_with_manifest(output, data, std::move(resolved));
}

int run_metrics(PointFlags& flags, const std::string& output, const std::string& format) {
  const auto p = flags.resolve();
  const auto m = performance_metrics(p);
  std::string data;
  if (format == "csv")
    data = to_csv({{p, m}}, metric_columns());
  else
    data = metrics_record(p, m).dump(2) + "\n";
  emit(output, data, {{"command", "metrics"}, {"format", format}, {"parameters", params_json(p)},
                      {"config", flags.config_path}});
  return kExitSuccess;
}

int run_sweep_cmd(PointFlags& flags, const std::vector<std::string>& axis_specs, std::vector<std::string> columns,
                  const std::string& output, const std::string& format) {
  const auto base = flags.resolve();
  SweepGrid grid;
  if (axis_specs.empty()) {
    grid = SweepGrid::loss_surface_preset();
    for (const auto& name : flags.explicitly_set) set_parameter(grid.base, name, flags.values[name]);
  } else {
    grid.base = base;
    for (const auto& spec : axis_specs) grid.axes.push_back(parse_axis(spec));
  }
  grid.fixed = flags.explicitly_set;
  if (!columns.empty()) grid.columns = columns.size() == 1 && columns[0] == "all" ? metric_columns() : columns;

  const auto rows = run_sweep(grid);
  const std::string data = format == "json" ? to_json(rows, grid.columns).dump(2) + "\n" : to_csv(rows, grid.columns);

  json axes = json::array();
  for (const auto& a : grid.axes)
    axes.push_back({{"parameter", a.parameter},
                    {"start", a.start},
                    {"stop", a.stop},
                    {"steps", a.steps},
                    {"scale", a.scale == AxisScale::transmission ? "transmission" : "linear"}});
  emit(output, data,
       {{"command", "sweep"},
        {"format", format},
        {"preset", axis_specs.empty() ? "loss-surface" : "none"},
        {"base", params_json(grid.base)},
        {"fixed", std::vector<std::string>(grid.fixed.begin(), grid.fixed.end())},
        {"axes", axes},
        {"columns", grid.columns},
        {"rows", rows.size()},
        {"config", flags.config_path}});
  return kExitSuccess;
}

int run_optimize(PointFlags& flags, const std::string& objective_name, const std::string& regime_name,
                 const std::string& phi_text, double tol, int grid_points, const std::string& output) {
  const auto p = flags.resolve();
  ConstraintRegime regime;
  regime.kappa = p.kappa;
  regime.eta = p.eta;
  regime.alpha = p.alpha;
  if (regime_name == "free") regime.kind = RegimeKind::free;
  else if (regime_name == "equal-splitters") regime.kind = RegimeKind::equal_splitters;
  else regime.kind = RegimeKind::fixed_mixer;
  if (phi_text == "free") {
    regime.phi.reset();
  } else {
    try {
      regime.phi = parse_number(phi_text);
    } catch (const std::invalid_argument&) {
      throw UsageError("--phi must be a number or 'free'");
    }
  }
  const Objective objective = objective_name == "rho-i" ? Objective::rho_intensity : Objective::rho_fluctuation;
  OptimizerOptions options;
  if (grid_points > 0) options.grid_points = options.grid_points_3d = grid_points;

  OptimumReport r;
  try {
    r = optimize(objective, regime, tol, options);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  json report{{"objective", to_string(r.objective)},
              {"regime", to_string(r.regime.kind)},
              {"outcome", to_string(r.kind)},
              {"boundary", r.kind != OptimumKind::interior},
              {"unbounded", r.kind == OptimumKind::unbounded},
              {"theta1", r.theta1},
              {"theta2", r.theta2},
              {"phi", r.phi},
              {"phi_free", !regime.phi.has_value()},
              {"value", json_number(r.value)},
              {"grid_best", json_number(r.grid_best)},
              {"kappa", regime.kappa},
              {"eta", regime.eta},
              {"alpha_abs", std::abs(regime.alpha)},
              {"evaluations", r.evaluations},
              {"tolerance", tol},
              {"bracket_width", r.bracket_width}};
  emit(output, report.dump(2) + "\n",
       {{"command", "optimize"}, {"objective", objective_name}, {"regime", regime_name}, {"phi", phi_text},
        {"tol", tol}, {"parameters", params_json(p)}, {"config", flags.config_path}});
  return kExitSuccess;
}

int default_cutoff() {
  if (const char* env = std::getenv("UIL_DEFAULT_CUTOFF")) {
    try {
      const double v = parse_number(env);
      if (v >= 1 && v == std::floor(v) && v < 1e6) return int(v);
    } catch (const std::invalid_argument&) {
    }
    throw UsageError(std::string("UIL_DEFAULT_CUTOFF must be a positive integer, got '") + env + "'");
  }
  return fock::kDefaultCutoff;
}

int run_verify(PointFlags& flags, CLI::Option* cutoff_opt, int cutoff, int samples, std::uint64_t seed, double tol,
               const std::string& output) {
  const auto p = flags.resolve();
  VerifyConfig config;
  config.alpha = p.alpha;
  config.cutoff = cutoff_opt->count() ? cutoff : default_cutoff();
  config.samples = samples;
  config.seed = seed;
  config.tol = tol;
  if (config.cutoff < 1) throw UsageError("--cutoff must be >= 1");
  if (samples < 0) throw UsageError("--samples must be >= 0");
  if (!(tol > 0)) throw UsageError("--tol must be > 0");

  const auto r = verify_against_oracle(config);
  json report{{"passed", r.passed},
              {"alpha_re", config.alpha.real()},
              {"alpha_im", config.alpha.imag()},
              {"cutoff", config.cutoff},
              {"samples", config.samples},
              {"seed", config.seed},
              {"tol", config.tol},
              {"max_deviation", r.deviation.max()},
              {"deviation",
               {{"mean_O", r.deviation.mean_O},
                {"std_O", r.deviation.std_O},
                {"intensity_probe", r.deviation.probe_intensity},
                {"std_intensity_probe", r.deviation.probe_std}}},
              {"lossless_std_O_minus_abs_alpha", r.lossless_std_deviation},
              {"max_edge_mass", r.max_edge_mass},
              {"truncation_warning", r.truncation_warning}};
  std::cerr << (r.passed ? "PASS" : "FAIL") << ": max deviation " << format_number(r.deviation.max()) << " over "
            << config.samples << " samples (tol " << format_number(config.tol) << ")\n";
  emit(output, report.dump(2) + "\n", {{"command", "verify"}, {"report", report}, {"config", flags.config_path}});
  return r.passed ? kExitSuccess : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbalanced interferometer toolkit: metrics, sweeps, optimisation, oracle verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UIL_VERSION));

  std::string output, format = "json";

  auto* metrics = app.add_subcommand("metrics", "Performance metrics at one parameter point");
  PointFlags metrics_flags;
  metrics_flags.add(metrics, kAllPointFlags);
  metrics->add_option("--output", output, "write to file (plus manifest) instead of stdout");
  metrics->add_option("--format", format, "json or csv")->check(CLI::IsMember({"csv", "json"}));

  auto* sweep = app.add_subcommand("sweep", "Evaluate metrics over a parameter grid");
  PointFlags sweep_flags;
  sweep_flags.add(sweep, kAllPointFlags);
  std::vector<std::string> axes, columns;
  std::string sweep_format = "csv";
  sweep->add_option("--axis", axes, "name:start:stop:steps[:transmission]; repeat for more axes; "
                                    "omitted = loss-surface preset");
  sweep->add_option("--columns", columns, "metric columns to emit ('all' for every metric)")->delimiter(',');
  sweep->add_option("--output", output, "data file; a .manifest.json is written next to it");
  sweep->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* opt = app.add_subcommand("optimize", "Maximise a performance ratio over mixing angles");
  PointFlags opt_flags;
  opt_flags.add(opt, {"kappa", "eta", "alpha_re", "alpha_im"});
  std::string objective = "rho-di", regime = "free", phi_text = "1.5707963267948966";
  double tol = 1e-8;
  int grid_points = 0;
  opt->add_option("--objective", objective, "rho-i or rho-di")->check(CLI::IsMember({"rho-i", "rho-di"}));
  opt->add_option("--regime", regime, "free, equal-splitters or fixed-mixer")
      ->check(CLI::IsMember({"free", "equal-splitters", "fixed-mixer"}));
  opt->add_option("--phi", phi_text, "working point in radians, or 'free'");
  opt->add_option("--tol", tol, "golden-section bracket width");
  opt->add_option("--grid-points", grid_points, "grid nodes per free angle (default 721, 181 in 3-D)");
  opt->add_option("--output", output, "write report to file (plus manifest)");

  auto* verify = app.add_subcommand("verify", "Check the closed forms against the Fock-space oracle");
  PointFlags verify_flags;
  verify_flags.add(verify, {"alpha_re", "alpha_im"});
  int cutoff = fock::kDefaultCutoff, samples = 50;
  std::uint64_t seed = 7;
  double verify_tol = 1e-8;
  auto* cutoff_opt = verify->add_option("--cutoff", cutoff, "Fock cutoff n_max (default $UIL_DEFAULT_CUTOFF or 40)");
  verify->add_option("--samples", samples, "random parameter points");
  verify->add_option("--seed", seed, "generator seed");
  verify->add_option("--tol", verify_tol, "absolute tolerance");
  verify->add_option("--output", output, "write report to file (plus manifest)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (metrics->parsed()) return run_metrics(metrics_flags, output, format);
    if (sweep->parsed()) return run_sweep_cmd(sweep_flags, axes, columns, output, sweep_format);
    if (opt->parsed()) return run_optimize(opt_flags, objective, regime, phi_text, tol, grid_points, output);
    if (verify->parsed()) return run_verify(verify_flags, cutoff_opt, cutoff, samples, seed, verify_tol, output);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fock::TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << "\n";
    std::cerr << "required cutoff: " << e.required_cutoff() << "\n";
    return kExitTruncation;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
