#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "uil/sweep.hpp"

using namespace uil;
using namespace uil::cli;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("uil_sweep_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("axis parsing and nodes") {
  const auto a = parse_axis("theta1:0:1.5:4");
  CHECK(a.parameter == "theta1");
  CHECK(a.steps == 4);
  CHECK(a.value(0) == 0);
  CHECK(a.value(1) == doctest::Approx(0.5));
  CHECK(a.value(3) == 1.5);
  const auto t = parse_axis("kappa:0.25:1:4:transmission");
  CHECK(t.scale == AxisScale::transmission);
  CHECK(t.value(0) == doctest::Approx(std::log(4.0)));
  CHECK(t.value(3) == 0.0);
  CHECK(!std::signbit(t.value(3)));
  CHECK_THROWS_AS(parse_axis("theta1:0:1"), UsageError);
  CHECK_THROWS_AS(parse_axis("theta1:0:x:3"), UsageError);
  CHECK_THROWS_AS(parse_axis("theta1:0:1:3.5"), UsageError);
  CHECK_THROWS_AS(parse_axis("theta1:0:1:3:log"), UsageError);
}

TEST_CASE("grid validation") {
  SweepGrid g;
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.axes = {parse_axis("theta1:0:1:1")};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.axes = {parse_axis("theta1:0:1:3"), parse_axis("theta1:0:1:3")};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.axes = {parse_axis("theta1:0:1:3")};
  g.fixed = {"theta1"};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.fixed = {"theta2"};
  CHECK_NOTHROW(g.validate());
  g.axes = {parse_axis("phi:0.5:1:3:transmission")};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.axes = {parse_axis("kappa:0:1:3:transmission")};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.axes = {parse_axis("bogus:0:1:3")};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.axes = {parse_axis("theta1:0:1:3")};
  g.columns = {"nope"};
  CHECK_THROWS_AS(g.validate(), UsageError);
  g.columns = metric_columns();
  g.axes = {parse_axis("eta:0:1:3")};
  CHECK_THROWS_AS(run_sweep(g), UsageError);  // eta = 0 is invalid
}

TEST_CASE("loss-surface preset") {
  const auto grid = SweepGrid::loss_surface_preset();
  const auto rows = run_sweep(grid);
  REQUIRE(rows.size() == 40 * 60);
  auto at = [&](int ti, int ki) -> const SweepRow& { return rows[std::size_t(ti) * 60 + ki]; };

  // transmission 1 is the last outer node, theta1 = pi/4 is node 29 (pi/120 * 30)
  const auto& corner = at(39, 29);
  CHECK(corner.params.kappa == 0);
  CHECK(corner.params.theta1 == doctest::Approx(pi / 4).epsilon(1e-14));
  CHECK(corner.metrics.rho_fluctuation == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // non-increasing as transmission decreases, at every theta1
  for (int k = 0; k < 60; ++k)
    for (int t = 1; t < 40; ++t) CHECK(at(t - 1, k).metrics.rho_fluctuation <= at(t, k).metrics.rho_fluctuation);

  // single-point sweep at the example corner theta1 = 0.01
  SweepGrid g;
  g.base = grid.base;
  g.axes = {parse_axis("theta1:0.01:0.02:2")};
  CHECK(run_sweep(g)[0].metrics.rho_fluctuation == doctest::Approx(2 * std::cos(0.01)).epsilon(1e-14));
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, u(rng));
    CHECK(parse_number(format_number(x)) == x);
  }
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isinf(parse_number("inf")));
  CHECK_THROWS_AS(parse_number("1.0x"), std::invalid_argument);
}

TEST_CASE("CSV round trip reproduces metrics") {
  SweepGrid g;
  g.base.kappa = 0.3;
  g.base.alpha = {1.5, 0.4};
  g.axes = {parse_axis("theta1:0:1.5:7"), parse_axis("phi:0:3:5")};
  const auto rows = run_sweep(g);
  const auto csv = to_csv(rows, g.columns);
  const auto table = parse_csv(csv);
  REQUIRE(table.size() == rows.size() + 1);
  const std::vector<std::string> expected_header{"theta1", "theta2", "phi", "kappa", "transmission", "eta",
                                                 "alpha_abs", "mean_O", "std_O", "delta_phi", "intensity_probe",
                                                 "std_intensity_probe", "rho_intensity", "rho_fluctuation",
                                                 "visibility"};
  CHECK(table[0] == expected_header);
  for (std::size_t r = 1; r < table.size(); ++r) {
    std::map<std::string, double> v;
    for (std::size_t c = 0; c < expected_header.size(); ++c) v[expected_header[c]] = parse_number(table[r][c]);
    InterferometerParams<double> p{v["theta1"], v["theta2"], v["phi"], v["kappa"], v["eta"], v["alpha_abs"]};
    const auto m = performance_metrics(p);
    auto close = [](double a, double b) { return (std::isinf(a) && a == b) || std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    CHECK(close(m.mean_O, v["mean_O"]));
    CHECK(close(m.std_O, v["std_O"]));
    CHECK(close(m.delta_phi, v["delta_phi"]));
    CHECK(close(m.intensity_probe, v["intensity_probe"]));
    CHECK(close(m.std_intensity_probe, v["std_intensity_probe"]));
    CHECK(close(m.rho_intensity, v["rho_intensity"]));
    CHECK(close(m.rho_fluctuation, v["rho_fluctuation"]));
    CHECK(close(m.visibility, v["visibility"]));
    CHECK(v["transmission"] == doctest::Approx(std::exp(-v["kappa"])));
  }
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("JSON output") {
  SweepGrid g;
  g.axes = {parse_axis("theta1:0:0.5:2")};
  const auto j = to_json(run_sweep(g), g.columns);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["delta_phi"] == "inf");
  CHECK(j[0]["rho_intensity"] == 0.0);
  CHECK(j[1]["delta_phi"].is_number());
  std::vector<std::string> keys;
  for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
  CHECK(keys.front() == "theta1");
  CHECK(keys.back() == "visibility");
  CHECK(j[0].size() == j[1].size());
}

TEST_CASE("manifest and checksum") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = temp_dir();
  const auto path = (dir / "data.csv").string();
  const auto m = write_with_manifest(path, "x,y\n1,2\n", {{"k", 1}});
  std::ifstream data(path), manifest(path + ".manifest.json");
  REQUIRE(data);
  REQUIRE(manifest);
  const auto j = nlohmann::json::parse(manifest);
  CHECK(j["checksum"]["value"] == sha256_hex("x,y\n1,2\n"));
  CHECK(j["resolved"]["k"] == 1);
  CHECK(j["tool_version"] == UIL_VERSION);
  CHECK(m.timestamp.size() == 20);
  CHECK_THROWS_AS(write_with_manifest((dir / "missing" / "x.csv").string(), "", {}), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config file") {
  const auto dir = temp_dir();
  const auto path = (dir / "run.conf").string();
  {
    std::ofstream out(path);
    out << "# comment\n\ntheta1 = 0.5\nalpha-re=2  # trailing\nformat = \"csv\"\n";
  }
  const auto cfg = parse_config_file(path);
  CHECK(cfg.at("theta1") == "0.5");
  CHECK(cfg.at("alpha_re") == "2");
  CHECK(cfg.at("format") == "csv");
  {
    std::ofstream out(path);
    out << "theta1 0.5\n";
  }
  CHECK_THROWS_AS(parse_config_file(path), UsageError);
  CHECK_THROWS_AS(parse_config_file((dir / "none.conf").string()), IoError);
  std::filesystem::remove_all(dir);
}
