#include "qcurv/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qcurv {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

Profile parse_profile(const std::string& s, const std::string& where) {
  if (s == "gaussian") return Profile::gaussian;
  if (s == "polybump") return Profile::polybump;
  if (s == "spheredensity") return Profile::spheredensity;
  throw ConfigError(where + ": unknown profile '" + s + "'");
}

}  // namespace

CurvatureDensity ScenarioConfig::make_density() const {
  return build_density(dimension, bumps,
                       alpha_target ? &*alpha_target : nullptr);
}

ScenarioConfig parse_scenario(const std::string& text,
                              const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(origin + ": expected an object");
  require_keys(root,
               {"schema_version", "scenario_id", "dimension", "density",
                "quadrature", "sweep", "checks", "tolerances", "seed", "grid",
                "output"},
               origin);

  ScenarioConfig sc;
  if (!root.contains("schema_version"))
    throw ConfigError(origin + ": missing schema_version");
  sc.schema_version = integer(root["schema_version"], origin);
  if (sc.schema_version != 1)
    throw ConfigError(origin + ": unsupported schema_version " +
                      std::to_string(sc.schema_version));
  if (!root.contains("dimension"))
    throw ConfigError(origin + ": missing dimension");
  sc.dimension = integer(root["dimension"], origin + ".dimension");
  if (root.contains("scenario_id"))
    sc.scenario_id = root["scenario_id"].get<std::string>();

  if (!root.contains("density"))
    throw ConfigError(origin + ": missing density");
  {
    const json& d = root["density"];
    require_keys(d, {"bumps", "alpha_target"}, origin + ".density");
    if (!d.contains("bumps"))
      throw ConfigError(origin + ".density: missing bumps");
    for (std::size_t i = 0; i < d["bumps"].size(); ++i) {
      const json& bj = d["bumps"][i];
      const std::string where =
          origin + ".density.bumps[" + std::to_string(i) + "]";
      require_keys(bj, {"profile", "center", "scale", "weight"}, where);
      BumpSpec b;
      if (!bj.contains("profile"))
        throw ConfigError(where + ": missing profile");
      b.profile = parse_profile(bj["profile"].get<std::string>(), where);
      if (bj.contains("center")) {
        const json& c = bj["center"];
        if (!c.is_array() || (int)c.size() != sc.dimension)
          throw ConfigError(where + ".center: expected " +
                            std::to_string(sc.dimension) + " coordinates");
        for (int k = 0; k < sc.dimension; ++k)
          b.center[k] = num(c[k], where + ".center");
      }
      if (bj.contains("scale")) b.scale = num(bj["scale"], where + ".scale");
      if (bj.contains("weight"))
        b.weight = num(bj["weight"], where + ".weight");
      sc.bumps.push_back(b);
    }
    if (d.contains("alpha_target"))
      sc.alpha_target = num(d["alpha_target"], origin + ".density.alpha_target");
  }

  if (root.contains("quadrature")) {
    const json& q = root["quadrature"];
    require_keys(q,
                 {"rel_tol", "abs_tol", "max_subdivisions", "angular_nodes",
                  "table_nodes", "table_rho_max"},
                 origin + ".quadrature");
    if (q.contains("rel_tol")) sc.quadrature.rel_tol = num(q["rel_tol"], origin);
    if (q.contains("abs_tol")) sc.quadrature.abs_tol = num(q["abs_tol"], origin);
    if (q.contains("max_subdivisions"))
      sc.quadrature.max_subdivisions = integer(q["max_subdivisions"], origin);
    if (q.contains("angular_nodes"))
      sc.quadrature.angular_nodes = integer(q["angular_nodes"], origin);
    if (q.contains("table_nodes"))
      sc.quadrature.table_nodes = integer(q["table_nodes"], origin);
    if (q.contains("table_rho_max"))
      sc.quadrature.table_rho_max = num(q["table_rho_max"], origin);
    if (sc.quadrature.rel_tol <= 0.0 || sc.quadrature.abs_tol <= 0.0)
      throw ConfigError(origin + ".quadrature: tolerances must be positive");
    if (sc.quadrature.angular_nodes < 16)
      throw ConfigError(origin + ".quadrature: angular_nodes must be >= 16");
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    require_keys(s, {"r_start", "r_stop", "count", "spacing"},
                 origin + ".sweep");
    if (s.contains("r_start")) sc.sweep.r_start = num(s["r_start"], origin);
    if (s.contains("r_stop")) sc.sweep.r_stop = num(s["r_stop"], origin);
    if (s.contains("count")) sc.sweep.count = integer(s["count"], origin);
    if (s.contains("spacing") &&
        s["spacing"].get<std::string>() != "geometric")
      throw ConfigError(origin + ".sweep: spacing must be 'geometric'");
    if (sc.sweep.r_start < 1.0)
      throw ConfigError(origin + ".sweep: r_start must be >= 1");
    if (sc.sweep.count < 8)
      throw ConfigError(origin + ".sweep: count must be >= 8");
    if (sc.sweep.r_stop <= sc.sweep.r_start)
      throw ConfigError(origin + ".sweep: r_stop must exceed r_start");
  }

  if (root.contains("checks")) {
    sc.checks.clear();
    for (const auto& c : root["checks"])
      sc.checks.push_back(c.get<std::string>());
  }
  if (root.contains("tolerances")) {
    for (auto it = root["tolerances"].begin(); it != root["tolerances"].end();
         ++it)
      sc.tolerances[it.key()] = num(it.value(), origin + ".tolerances");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer())
      throw ConfigError(origin + ".seed: expected an integer");
    sc.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("grid")) {
    const json& g = root["grid"];
    require_keys(g, {"half_width", "nodes_per_axis", "stencil"},
                 origin + ".grid");
    GridConfig gc;
    if (g.contains("half_width")) gc.half_width = num(g["half_width"], origin);
    if (g.contains("nodes_per_axis"))
      gc.nodes_per_axis = integer(g["nodes_per_axis"], origin);
    if (g.contains("stencil") &&
        g["stencil"].get<std::string>() != "axis+diagonal")
      throw ConfigError(origin + ".grid: stencil must be 'axis+diagonal'");
    if (gc.nodes_per_axis < 11 || gc.nodes_per_axis % 2 == 0)
      throw ConfigError(origin + ".grid: nodes_per_axis must be odd and >= 11");
    sc.grid = gc;
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    require_keys(o, {"sweep_csv_path", "report_path"}, origin + ".output");
    if (o.contains("sweep_csv_path"))
      sc.sweep_csv_path = o["sweep_csv_path"].get<std::string>();
    if (o.contains("report_path"))
      sc.report_path = o["report_path"].get<std::string>();
  }

  // construction-time validation of the density spec
  sc.make_density();
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig sc = parse_scenario(ss.str(), path);
  if (sc.scenario_id == "scenario") {
    // default id from the file stem
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    sc.scenario_id = stem;
  }
  return sc;
}

}  // namespace qcurv
