#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qnc/scenario.hpp"

using namespace qnc::cli;
namespace fs = std::filesystem;

namespace {

Json scenario(const std::string& scheme) {
  Json j{{"scheme", scheme}, {"oscillator", {{"nu", 1.0}}}};
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qnc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QNC_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write(const fs::path& p, const Json& j) {
  std::ofstream(p) << j.dump(2);
}

// (metric -> values in sweep order) for one metric name
std::vector<double> sweep_column(const std::string& csv, const std::string& metric) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() >= 3 && f[1] == metric) out.push_back(std::stod(f[2]));
  }
  return out;
}

}  // namespace

TEST_CASE("budget scenario reports the cancelled total") {
  auto cfg = scenario("budget");
  const auto res = run_scenario(resolve(cfg));
  CHECK(res.summary["schema"] == 1);
  CHECK(res.summary["total"].get<double>() == 4.125);
  CHECK(res.summary["total_uncancelled"].get<double>() == 12.125);
  CHECK(res.files.at("budget.csv").rfind("component,value\n", 0) == 0);
}

TEST_CASE("broadband round-trip scenario is exact") {
  const auto res = run_scenario(resolve(scenario("broadband")));
  CHECK(res.summary["relative_l2_error"].get<double>() < 1e-9);
  CHECK(res.summary["relative_l2_error_three_term"].get<double>() < 1e-9);
  CHECK(res.files.at("force.csv").rfind("omega,re,im\n", 0) == 0);
}

TEST_CASE("narrowband scenarios run") {
  auto c1 = scenario("narrowband_case1");
  c1["oscillator"]["gamma"] = 0.001;
  const auto r1 = run_scenario(resolve(c1));
  CHECK(r1.summary["relative_l2_error"].get<double>() < 1e-9);
  CHECK(r1.summary["warnings"].empty());

  const auto r2 = run_scenario(resolve(scenario("narrowband_case2")));
  CHECK(r2.summary["n_terms"] == 100);
  CHECK(r2.summary["relative_l2_error"].get<double>() < 3e-2);
}

TEST_CASE("validation names the offending field") {
  Json missing{{"scheme", "broadband"}, {"oscillator", {{"gamma", 0.1}}}};
  try {
    (void)resolve(missing);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("oscillator.nu") != std::string::npos);
  }
  auto typo = scenario("broadband");
  typo["oscilator"] = Json::object();
  CHECK_THROWS_AS((void)resolve(typo), ConfigError);
  auto wrong = scenario("broadband");
  wrong["run"]["n_steps"] = 1.5;
  CHECK_THROWS_AS((void)resolve(wrong), ConfigError);
  auto bad = scenario("tc_pair");
  bad["run"]["dt"] = 1.0;
  CHECK_THROWS_AS((void)resolve(bad), ConfigError);
  CHECK_THROWS_AS((void)resolve(Json{{"oscillator", {{"nu", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config("{ \"scheme\": "), ConfigError);
}

TEST_CASE("overrides use dotted paths and JSON values") {
  Json c = scenario("tc_pair");
  apply_override(c, "run.base_seed=7");
  apply_override(c, "measurement.observable=X_minus");
  apply_override(c, "oscillator.gamma=0.05");
  CHECK(c["run"]["base_seed"].is_number_integer());
  CHECK(c["measurement"]["observable"] == "X_minus");
  CHECK(c["oscillator"]["gamma"].get<double>() == 0.05);
  CHECK_THROWS_AS(apply_override(c, "novalue"), ConfigError);
}

TEST_CASE("resolved configuration is closed and reproducible") {
  auto c = scenario("tc_pair");
  c["run"]["n_trajectories"] = 40;
  c["run"]["n_steps"] = 400;
  const Json r = resolve(c);
  CHECK(resolve(r) == r);
  const auto a = run_scenario(r, 1);
  const auto b = run_scenario(resolve(r), 4);
  CHECK(a.summary.dump() == b.summary.dump());
  CHECK(a.files == b.files);
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(format_number(1.0) == "1.00000000000000000e+00");
  CHECK(std::stod(format_number(0.1)) == 0.1);
}

TEST_CASE("sweep values") {
  CHECK(parse_sweep_values("0:1:3") == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(parse_sweep_values("1,2,5") == std::vector<double>{1.0, 2.0, 5.0});
  CHECK_THROWS_AS(parse_sweep_values(""), ConfigError);
  CHECK_THROWS_AS(parse_sweep_values("0:1:0"), ConfigError);
}

TEST_CASE("sweeping k cancels back-action for P_minus only") {
  auto c = scenario("tc_pair");
  c["run"]["n_trajectories"] = 2000;
  c["run"]["stride"] = 100;
  const auto csv = run_sweep(c, {"measurement.k", {0.0, 0.5, 1.0}});
  const auto pm = sweep_column(csv, "final_variance.P_minus");
  const auto p1 = sweep_column(csv, "final_variance.p1");
  REQUIRE(pm.size() == 3);
  REQUIRE(p1.size() == 3);
  // standard error of a variance near 2 with 2000 samples is ~0.063
  CHECK(std::abs(pm[1] - pm[0]) < 0.25);
  CHECK(std::abs(pm[2] - pm[0]) < 0.25);
  CHECK(p1[1] > p1[0] + 5.0);
  CHECK(p1[2] > p1[1] + 5.0);
}

TEST_CASE("sweeping the case II term count lowers the error") {
  const auto csv = run_sweep(scenario("narrowband_case2"),
                             {"run.n_terms", parse_sweep_values("1:20:20")});
  const auto err = sweep_column(csv, "relative_l2_error");
  REQUIRE(err.size() == 20);
  CHECK(err.back() < 0.2 * err.front());
  for (std::size_t i = 5; i < err.size(); ++i) CHECK(err[i] < err[i - 5]);
}

TEST_CASE("a failing sweep point is recorded and the sweep continues") {
  const auto csv = run_sweep(scenario("broadband"), {"oscillator.gamma", {-1.0, 0.1}});
  CHECK(csv.find("config_error") != std::string::npos);
  CHECK(sweep_column(csv, "relative_l2_error").size() == 1);
  CHECK_THROWS_AS(run_sweep(scenario("broadband"), {"oscillator.gamma", {}}), ConfigError);
  CHECK_THROWS_AS(run_sweep(scenario("broadband"), {"scheme", {1.0}}), ConfigError);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("exit");
  write(dir / "missing.json", Json{{"scheme", "broadband"}});
  CHECK(run_cli("run --config " + (dir / "missing.json").string() + " --out " + (dir / "o").string(),
                dir / "log1") == 2);
  CHECK(slurp(dir / "log1").find("oscillator.nu") != std::string::npos);

  write(dir / "bb.json", scenario("broadband"));
  CHECK(run_cli("run --config " + (dir / "bb.json").string() + " --set run.n_max=0 --out " +
                    (dir / "o").string(),
                dir / "log2") == 3);
  CHECK(slurp(dir / "log2").find("reconstruct_broadband") != std::string::npos);

  CHECK(run_cli("sweep --config " + (dir / "bb.json").string() + " --param oscillator.gamma --range \"\"",
                dir / "log3") == 2);
  CHECK(run_cli("run --config " + (dir / "nope.json").string(), dir / "log4") == 2);
  CHECK(run_cli("bogus", dir / "log5") == 2);
}

TEST_CASE("command line runs are byte-identical and honour seed precedence") {
  const auto dir = scratch("determinism");
  auto c = scenario("tc_pair");
  c["run"]["n_trajectories"] = 100;
  c["run"]["n_steps"] = 400;
  write(dir / "tc.json", c);
  const std::string base = "run --config " + (dir / "tc.json").string();
  REQUIRE(run_cli(base + " --out " + (dir / "a").string() + " --threads 1", dir / "la") == 0);
  REQUIRE(run_cli(base + " --out " + (dir / "b").string() + " --threads 4", dir / "lb") == 0);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
    ++n;
  }
  CHECK(n == 3);

  const std::string v = "validate --config " + (dir / "tc.json").string();
  REQUIRE(run_cli(v + " --seed 9", dir / "lv1") == 0);
  CHECK(slurp(dir / "lv1").find("\"base_seed\": 9") != std::string::npos);
  setenv("QNC_SEED", "5", 1);
  REQUIRE(run_cli(v, dir / "lv3") == 0);
  CHECK(slurp(dir / "lv3").find("\"base_seed\": 5") != std::string::npos);
  REQUIRE(run_cli(v + " --seed 9", dir / "lv4") == 0);
  CHECK(slurp(dir / "lv4").find("\"base_seed\": 9") != std::string::npos);
  unsetenv("QNC_SEED");
}
