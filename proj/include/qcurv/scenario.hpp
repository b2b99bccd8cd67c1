#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcurv/geometry.hpp"

namespace qcurv {

struct ScenarioConfig {
  int schema_version = 1;
  std::string scenario_id = "scenario";
  int dimension = 4;
  std::vector<BumpSpec> bumps;
  std::optional<double> alpha_target;
  QuadConfig quadrature;
  SweepConfig sweep;
  std::vector<std::string> checks{"all"};
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 1;
  std::optional<GridConfig> grid;
  std::string sweep_csv_path;
  std::string report_path;

  CurvatureDensity make_density() const;
};

// Strict parse: unknown keys are rejected, schema_version must be 1.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin = "<string>");

}  // namespace qcurv
