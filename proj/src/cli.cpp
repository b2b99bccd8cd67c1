#include "qcurv/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qcurv/verify.hpp"

namespace qcurv {

namespace {

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename " + tmp + " to " + path);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* profile_name(Profile p) {
  switch (p) {
    case Profile::gaussian: return "gaussian";
    case Profile::polybump: return "polybump";
    case Profile::spheredensity: return "spheredensity";
  }
  return "?";
}

int cmd_describe(const ScenarioConfig& sc) {
  const CurvatureDensity d = sc.make_density();
  std::cout << "scenario: " << sc.scenario_id << "\n";
  std::cout << "n = " << sc.dimension << "\n";
  std::cout << "bumps (" << d.bumps().size() << "):\n";
  for (std::size_t i = 0; i < d.bumps().size(); ++i) {
    const BumpSpec& b = d.bumps()[i];
    std::cout << "  " << profile_name(b.profile) << " center=(";
    for (int k = 0; k < sc.dimension; ++k)
      std::cout << (k ? "," : "") << b.center[k];
    std::cout << ") scale=" << b.scale << " weight=" << b.weight
              << " mass=" << fmt(d.bump_mass(i)) << "\n";
  }
  std::cout << "mass = " << fmt(d.mass()) << "\n";
  std::cout << "alpha = " << fmt(d.alpha()) << "\n";
  if (d.is_radial() && d.is_nonnegative()) {
    std::cout << "completeness: "
              << (d.alpha() <= 1.0 + 1e-12
                      ? "complete (alpha <= 1, radial nonnegative)"
                      : "INCOMPLETE (alpha > 1)")
              << "\n";
  } else {
    std::cout << "completeness: undetermined (non-radial or signed density)\n";
  }
  std::cout << "applicable checks:";
  for (const auto& id : check_registry())
    if (check_hypothesis_reason(id, sc.dimension, d.is_radial(),
                                d.is_nonnegative(), d.alpha(),
                                sc.grid.has_value())
            .empty())
      std::cout << " " << id;
  std::cout << "\n";
  return 0;
}

int cmd_sweep(const ScenarioConfig& sc) {
  const PotentialField F = build_field(sc.make_density(), sc.quadrature);
  const std::vector<RadialSweepRow> rows = run_sweep(F, sc.sweep);
  const std::string path =
      sc.sweep_csv_path.empty() ? sc.scenario_id + "_sweep.csv"
                                : sc.sweep_csv_path;
  // serialize to memory first, written once atomically
  {
    const std::string tmp_path = path + ".render";
    write_sweep_csv(tmp_path, F, rows);
    std::ifstream in(tmp_path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    in.close();
    std::remove(tmp_path.c_str());
    write_atomic(path, ss.str());
  }
  if (F.density().is_radial() && !is_complete_radial(F))
    std::cerr << "warning: incomplete metric (alpha > 1); geodesic radii "
                 "approach the finite total ray length\n";
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_verify(const ScenarioConfig& sc,
               const std::vector<std::string>& check_override,
               const std::map<std::string, double>& tol_override) {
  const PotentialField F = build_field(sc.make_density(), sc.quadrature);
  std::map<std::string, double> tols = sc.tolerances;
  for (const auto& [k, v] : tol_override) tols[k] = v;
  for (const auto& [k, v] : tols) {
    (void)v;
    if (std::find(check_registry().begin(), check_registry().end(), k) ==
        check_registry().end())
      throw ConfigError("tolerance for unknown check '" + k + "'");
  }
  const std::vector<std::string>& selection =
      check_override.empty() ? sc.checks : check_override;

  const std::vector<CheckReport> reports =
      run_checks(F, sc, selection, tols);
  const std::string path = sc.report_path.empty()
                               ? sc.scenario_id + "_report.json"
                               : sc.report_path;
  write_atomic(path, render_report(reports));

  int npass = 0, nfail = 0;
  for (const auto& r : reports) {
    const char* s = r.status == CheckStatus::pass
                        ? "pass"
                        : r.status == CheckStatus::fail ? "FAIL"
                                                        : "exploratory";
    std::cout << "  " << s << "  " << r.check_id;
    if (r.status == CheckStatus::exploratory && !r.reason.empty())
      std::cout << " (" << r.reason << ")";
    else
      std::cout << "  deviation=" << fmt(r.deviation)
                << " tolerance=" << fmt(r.tolerance);
    std::cout << "  [" << r.runtime_ms << " ms]\n";
    if (r.status == CheckStatus::pass) ++npass;
    if (r.status == CheckStatus::fail) ++nfail;
  }
  std::cout << "PASS " << npass << "/" << (npass + nfail) << "\n";
  return nfail == 0 ? 0 : 1;
}

int cmd_oracle(const ScenarioConfig& sc, const std::string& points_path) {
  const PotentialField F = build_field(sc.make_density(), sc.quadrature);
  const int n = sc.dimension;
  std::vector<Vec> points;
  if (points_path.empty()) throw ConfigError("oracle requires --points");
  std::ifstream in(points_path);
  if (!in) throw ConfigError(points_path + ": cannot open");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Vec x{};
    for (int i = 0; i < n; ++i)
      if (!(ss >> x[i]))
        throw ConfigError(points_path + ": expected " + std::to_string(n) +
                          " coordinates per line");
    points.push_back(x);
  }

  double maxrel = 0.0;
  std::cout << "point | field | kernel | finite-difference | rel.diff\n";
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Vec& x = points[pi];
    const DerivativeStack ks = F.eval_stack(x);
    const DerivativeStack fs = fd_oracle(F, x, 1e-3);
    auto row = [&](const char* name, double kv, double fv) {
      const double rel = std::abs(kv - fv) / std::max(1.0, std::abs(kv));
      maxrel = std::max(maxrel, rel);
      std::cout << "  p" << pi << " | " << name << " | " << fmt(kv) << " | "
                << fmt(fv) << " | " << fmt(rel) << "\n";
    };
    row("u", ks.u, fs.u);
    for (int i = 0; i < n; ++i)
      row(("grad" + std::to_string(i)).c_str(), ks.grad[i], fs.grad[i]);
    row("lap", ks.lap, fs.lap);
    for (int i = 0; i < n; ++i)
      row(("gradlap" + std::to_string(i)).c_str(), ks.grad_lap[i],
          fs.grad_lap[i]);
    row("bilap", ks.bilap, fs.bilap);
    std::cout << "  p" << pi
              << " | pde_residual | " << fmt(pde_residual(F, x, 0.02))
              << "\n";
  }
  std::cout << "max relative discrepancy: " << fmt(maxrel) << "\n";
  return 0;
}

void usage() {
  std::cout
      << "qcurv — conformal Q-curvature laboratory\n"
         "usage:\n"
         "  qcurv describe <config.json>\n"
         "  qcurv sweep <config.json>\n"
         "  qcurv verify <config.json> [--checks id,id,...] "
         "[--tol name=value]...\n"
         "  qcurv oracle <config.json> --points <file>\n"
         "exit codes: 0 success, 1 check failure, 2 configuration error\n"
         "env: QCURV_WORKERS overrides the worker count\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  try {
    if (args.empty()) {
      usage();
      return 2;
    }
    const std::string& cmd = args[0];
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
      usage();
      return 0;
    }
    if (args.size() < 2) {
      usage();
      return 2;
    }
    const ScenarioConfig sc = load_scenario(args[1]);

    std::vector<std::string> checks;
    std::map<std::string, double> tols;
    std::string points_path;
    for (std::size_t i = 2; i < args.size(); ++i) {
      const std::string& a = args[i];
      auto next = [&]() -> const std::string& {
        if (i + 1 >= args.size())
          throw ConfigError("missing value after " + a);
        return args[++i];
      };
      if (a == "--checks") {
        std::istringstream ss(next());
        std::string id;
        while (std::getline(ss, id, ','))
          if (!id.empty()) checks.push_back(id);
      } else if (a == "--tol") {
        const std::string& kv = next();
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
          throw ConfigError("--tol expects name=value");
        tols[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      } else if (a == "--points") {
        points_path = next();
      } else {
        throw ConfigError("unknown option " + a);
      }
    }

    if (cmd == "describe") return cmd_describe(sc);
    if (cmd == "sweep") return cmd_sweep(sc);
    if (cmd == "verify") return cmd_verify(sc, checks, tols);
    if (cmd == "oracle") return cmd_oracle(sc, points_path);
    std::cerr << "unknown command: " << cmd << "\n";
    usage();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << "\n";
    return 2;
  } catch (const BuildError& e) {
    std::cerr << "build error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace qcurv
