#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qcurv/cli.hpp"
#include "qcurv/scenario.hpp"

using namespace qcurv;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

const char* kZeroCfg = R"({
  "schema_version": 1,
  "scenario_id": "cli_zero",
  "dimension": 4,
  "density": {"bumps": []},
  "sweep": {"r_start": 1.0, "r_stop": 100.0, "count": 8, "spacing": "geometric"},
  "checks": ["LIMIT_R2LAP", "LIMIT_ISO", "PDE_RESIDUAL", "KERNEL_MEANVALUE"],
  "seed": 7,
  "output": {"sweep_csv_path": "/tmp/cli_zero_sweep.csv",
             "report_path": "/tmp/cli_zero_report.json"}
})";

}  // namespace

TEST_CASE("scenario parser: strict keys, schema, defaults") {
  CHECK_THROWS_AS(parse_scenario("{\"schema_version\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("not json"), ConfigError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"schema_version": 2, "dimension": 4,
                         "density": {"bumps": []}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"schema_version": 1, "dimension": 4,
                         "density": {"bumps": []}, "typo_key": 1})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"schema_version": 1, "dimension": 5,
                         "density": {"bumps": []}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"schema_version": 1, "dimension": 4,
                         "density": {"bumps": []},
                         "sweep": {"r_start": 0.5}})"),
      ConfigError);

  const ScenarioConfig sc = parse_scenario(kZeroCfg);
  CHECK(sc.scenario_id == "cli_zero");
  CHECK(sc.dimension == 4);
  CHECK(sc.sweep.count == 8);
  CHECK(sc.checks.size() == 4);
  CHECK(sc.make_density().is_zero());
}

TEST_CASE("cli: describe, sweep, verify on the zero scenario") {
  spit("/tmp/cli_zero.json", kZeroCfg);
  CHECK(cli_main({"describe", "/tmp/cli_zero.json"}) == 0);
  CHECK(cli_main({"sweep", "/tmp/cli_zero.json"}) == 0);
  const std::string csv = slurp("/tmp/cli_zero_sweep.csv");
  CHECK(csv.rfind("r,ubar,", 0) == 0);

  CHECK(cli_main({"verify", "/tmp/cli_zero.json"}) == 0);
  const std::string rep1 = slurp("/tmp/cli_zero_report.json");
  CHECK(cli_main({"verify", "/tmp/cli_zero.json"}) == 0);
  CHECK(slurp("/tmp/cli_zero_report.json") == rep1);  // byte-identical
  CHECK(rep1.find("\"check_id\": \"LIMIT_R2LAP\"") != std::string::npos);

  // forced zero tolerance fails with exit code 1
  CHECK(cli_main({"verify", "/tmp/cli_zero.json", "--checks", "KERNEL_RIESZ",
                  "--tol", "KERNEL_RIESZ=-1"}) == 1);
  // unknown check name is a configuration error
  CHECK(cli_main({"verify", "/tmp/cli_zero.json", "--checks", "NOPE"}) == 2);
  // tolerance override for an unknown check is rejected too
  CHECK(cli_main({"verify", "/tmp/cli_zero.json", "--tol", "NOPE=0.1"}) == 2);
  // same for a tolerances entry in the config file itself
  spit("/tmp/cli_badtol.json", R"({
    "schema_version": 1, "dimension": 4, "density": {"bumps": []},
    "checks": ["PDE_RESIDUAL"], "tolerances": {"NOT_A_CHECK": 0.5},
    "output": {"report_path": "/tmp/cli_badtol_report.json"}})");
  CHECK(cli_main({"verify", "/tmp/cli_badtol.json"}) == 2);
}

TEST_CASE("cli: oracle command") {
  spit("/tmp/cli_zero.json", kZeroCfg);
  spit("/tmp/cli_pts.txt", "0.1 0.2 0.3 0.4\n-0.5 0 0 0.2\n");
  CHECK(cli_main({"oracle", "/tmp/cli_zero.json", "--points",
                  "/tmp/cli_pts.txt"}) == 0);
  CHECK(cli_main({"oracle", "/tmp/cli_zero.json"}) == 2);
}

TEST_CASE("cli: oracle on the sphere model prints a small max discrepancy") {
  spit("/tmp/cli_sphere.json", R"({
    "schema_version": 1, "scenario_id": "cli_sphere", "dimension": 4,
    "density": {"bumps": [{"profile": "spheredensity",
                 "center": [0.0,0.0,0.0,0.0], "scale": 1.0, "weight": 1.0}]},
    "output": {"report_path": "/tmp/cli_sphere_report.json"}})");
  spit("/tmp/cli_sphere_pts.txt", "0.3 0 0 0\n-0.2 0.5 0.1 0\n");
  const std::string cli = QCURV_CLI_PATH;
  const int rc = std::system((cli + " verify /tmp/cli_sphere.json --checks "
                                    "PDE_RESIDUAL > /dev/null")
                                 .c_str());
  CHECK(rc == 0);
  const int rc2 = std::system(
      (cli + " oracle /tmp/cli_sphere.json --points /tmp/cli_sphere_pts.txt "
             "> /tmp/cli_sphere_oracle.txt")
          .c_str());
  CHECK(rc2 == 0);
  const std::string out = slurp("/tmp/cli_sphere_oracle.txt");
  const auto pos = out.find("max relative discrepancy: ");
  REQUIRE(pos != std::string::npos);
  const double maxrel = std::stod(out.substr(pos + 26));
  CHECK(maxrel <= 1e-4);
}

TEST_CASE("cli: results are invariant to the worker count") {
  spit("/tmp/cli_workers.json", R"({
    "schema_version": 1, "scenario_id": "cli_workers", "dimension": 4,
    "density": {"bumps": [{"profile": "gaussian",
                 "center": [0.0,0.0,0.0,0.0], "scale": 1.0, "weight": 1.0}]},
    "quadrature": {"table_nodes": 300, "table_rho_max": 2000.0},
    "sweep": {"r_start": 1.0, "r_stop": 1000.0, "count": 10,
              "spacing": "geometric"},
    "checks": ["LIMIT_R2LAP", "POS_Q2", "B_CONSISTENCY"],
    "seed": 99,
    "output": {"sweep_csv_path": "/tmp/cli_workers_sweep.csv",
               "report_path": "/tmp/cli_workers_report.json"}})");
  const std::string cli = QCURV_CLI_PATH;
  auto run_with = [&](const char* workers) {
    const std::string cmd = std::string("QCURV_WORKERS=") + workers + " " +
                            cli + " verify /tmp/cli_workers.json > /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string rep = slurp("/tmp/cli_workers_report.json");
    const std::string cmd2 = std::string("QCURV_WORKERS=") + workers + " " +
                             cli + " sweep /tmp/cli_workers.json > /dev/null";
    REQUIRE(std::system(cmd2.c_str()) == 0);
    return rep + slurp("/tmp/cli_workers_sweep.csv");
  };
  const std::string one = run_with("1");
  const std::string two = run_with("2");
  const std::string four = run_with("4");
  CHECK(one == two);
  CHECK(one == four);
}

TEST_CASE("cli: configuration errors exit with code 2") {
  CHECK(cli_main({"describe", "/tmp/does_not_exist.json"}) == 2);
  spit("/tmp/cli_bad.json", R"({"schema_version": 1, "dimension": 3,
                                "density": {"bumps": []}})");
  CHECK(cli_main({"describe", "/tmp/cli_bad.json"}) == 2);
  CHECK(cli_main({"frobnicate", "/tmp/cli_zero.json"}) == 2);
  CHECK(cli_main({}) == 2);
}
