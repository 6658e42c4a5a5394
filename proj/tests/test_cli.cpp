#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "contractforge/commands.hpp"
#include "contractforge/errors.hpp"
#include "contractforge/run_config.hpp"

using namespace contractforge;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = CONTRACTFORGE_CONFIG_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
  fs::path dir;
};

Run run(const std::string& command, const fs::path& config, std::optional<std::size_t> threads = {}) {
  static int counter = 0;
  const auto dir = fs::temp_directory_path() / ("contractforge_cli_" + std::to_string(::getpid()) + "_" +
                                                std::to_string(counter++));
  fs::remove_all(dir);
  CommandOptions opts;
  opts.config = config;
  opts.out_dir = dir;
  opts.threads = threads;
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(command, opts, out, err);
  return {code, out.str(), err.str(), dir};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

json results(const Run& r, const std::string& command) {
  std::ifstream in(r.dir / (command + ".json"));
  return json::parse(in)["results"];
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("config parsing") {
  const auto rc = load_run_config(kConfigs / "audit_linear.json");
  CHECK(rc.u1 == 1.0);
  CHECK(rc.a_min == 0.05);
  REQUIRE(rc.types.has_value());
  CHECK(rc.types->thetas.size() == 8);
  CHECK(rc.types->thetas.front() == doctest::Approx(0.5));
  CHECK(rc.types->thetas.back() == doctest::Approx(4.0));
  CHECK(rc.incentive->kind() == "piecewise_linear");
}

TEST_CASE("config errors name the key and line") {
  try {
    parse_run_config("{\n  \"cost\": {\"family\": \"quadratic\"},\n  \"u1\": 1,\n  \"colour\": 3\n}", "cfg.json");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("colour") != std::string::npos);
    CHECK(msg.find("cfg.json:4") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config("{\"cost\": {\"family\": \"quadratic\"}}"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"cost\": {\"family\": \"cubic\"}, \"u1\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"cost\": "), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"cost\": {\"family\": \"quadratic\"}, \"u1\": \"one\"}"), ConfigError);
}

TEST_CASE("validate exit codes") {
  CHECK(run("validate", kConfigs / "quadratic_validate.json").code == kExitOk);
  CHECK(run("validate", kConfigs / "tabulated_validate.json").code == kExitOk);
  CHECK(run("validate", kConfigs / "nonconvex_validate.json").code == kExitValidationFailure);
  const auto missing = write_temp("contractforge_missing_u1.json", "{\"cost\": {\"family\": \"quadratic\"}}");
  const auto r = run("validate", missing);
  CHECK(r.code == kExitConfigError);
  CHECK(r.err.find("u1") != std::string::npos);
  CHECK(run("validate", kConfigs / "does_not_exist.json").code == kExitConfigError);
}

TEST_CASE("audit verdicts") {
  auto r = run("audit", kConfigs / "audit_constant.json");
  REQUIRE(r.code == kExitOk);
  CHECK(results(r, "audit")["verdict"] == "truthful");
  CHECK(slurp(r.dir / "audit.csv").rfind("theta,truthful_action,best_deviation,gain\n", 0) == 0);

  r = run("audit", kConfigs / "audit_linear.json");
  REQUIRE(r.code == kExitOk);
  const auto lin = results(r, "audit");
  CHECK(lin["verdict"] == "untruthful");
  CHECK(lin["worst_gain"].get<double>() > 0.0);
  CHECK(lin["methods_agree"] == true);
}

TEST_CASE("audit verdict flips across the step boundary") {
  const auto below = run("audit", kConfigs / "audit_step_1.40.json");
  const auto above = run("audit", kConfigs / "audit_step_1.43.json");
  REQUIRE(below.code == kExitOk);
  REQUIRE(above.code == kExitOk);
  CHECK(results(below, "audit")["verdict"] == "truthful");
  CHECK(results(above, "audit")["verdict"] == "untruthful");
}

TEST_CASE("design, adjustment and solve commands") {
  auto r = run("design-step", kConfigs / "design_step.json");
  REQUIRE(r.code == kExitOk);
  const auto d = results(r, "design-step")["design"];
  CHECK(d["feasible"] == true);
  CHECK(d["incentive"]["t"].get<double>() == doctest::Approx(1.0));
  CHECK(d["incentive"]["u_above"].get<double>() == 1.2);
  CHECK(d["incentive"]["u_below"].get<double>() == 1.0);

  const auto infeasible = write_temp(
      "contractforge_infeasible.json",
      R"({"cost": {"family": "quadratic"}, "u1": 1, "design": {"theta_L": 1, "theta_H": 2, "u_L": 2, "u_H": 1}})");
  r = run("design-step", infeasible);
  CHECK(r.code == kExitOk);
  CHECK(results(r, "design-step")["design"]["feasible"] == false);

  r = run("build-adjustment", kConfigs / "adjustment_constant.json");
  REQUIRE(r.code == kExitOk);
  std::ifstream fee(r.dir / "fee_table.csv");
  std::string line;
  std::getline(fee, line);
  CHECK(line == "a1,f");
  while (std::getline(fee, line)) CHECK(line.substr(line.find(',') + 1) == "0");
  CHECK(results(r, "build-adjustment")["finite_penalty_breakdown"]["breakdown_theta"].get<double>() ==
        doctest::Approx(2.01));

  r = run("solve", kConfigs / "solve_linear.json");
  REQUIRE(r.code == kExitOk);
  const auto s = results(r, "solve")["complete_info"][1];
  CHECK(s["theta"].get<double>() == 1.0);
  CHECK(s["u_e"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s["a_e"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("sweep writes a long table") {
  const auto r = run("sweep", kConfigs / "sweep_step.json");
  REQUIRE(r.code == kExitOk);
  std::istringstream csv(slurp(r.dir / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "parameter,value,quantity,result");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 21 * 6);
}

TEST_CASE("truthful action outside the interval is a config error") {
  const auto bad = write_temp(
      "contractforge_outside.json",
      R"({"cost": {"family": "quadratic"}, "u1": 1, "working_interval": [0.001, 0.5],
          "types": {"kind": "discrete", "thetas": [1]}, "incentive": {"kind": "constant", "u": 1}})");
  CHECK(run("audit", bad).code == kExitConfigError);
}

TEST_CASE("domain failures exit with code 3") {
  const auto table = (kConfigs / "quadratic_table.csv").string();
  const auto bad = write_temp(
      "contractforge_domain.json",
      R"({"cost": {"family": "tabulated", "csv": ")" + table + R"("}, "u1": 1, "working_interval": [0.1, 3.5],
          "types": {"kind": "discrete", "thetas": [1]}, "incentive": {"kind": "constant", "u": 10}})");
  const auto r = run("audit", bad);
  CHECK(r.code == kExitNumericFailure);
  CHECK(r.err.find("numeric failure") != std::string::npos);
}

TEST_CASE("results are identical across worker counts") {
  const auto one = run("audit", kConfigs / "audit_linear.json", 1);
  const auto eight = run("audit", kConfigs / "audit_linear.json", 8);
  CHECK(results(one, "audit").dump() == results(eight, "audit").dump());
  CHECK(slurp(one.dir / "audit.csv") == slurp(eight.dir / "audit.csv"));
}
