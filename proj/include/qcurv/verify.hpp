#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcurv/scenario.hpp"

namespace qcurv {

enum class CheckStatus { pass, fail, exploratory };

struct CheckReport {
  std::string check_id;
  std::string scenario_id;
  std::vector<std::pair<double, double>> samples;
  double predicted = 0.0;
  std::string predicted_descriptor;  // bound form, e.g. ">= 0"
  double deviation = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
  std::string reason;  // machine-readable skip reason for exploratory
  std::int64_t runtime_ms = 0;
};

// Extrapolated limit A of samples (r, value) modeled as A + B r^{-q} on the
// last half; order < 0 flags the exact/fallback cases.
struct LimitFit {
  double estimate = 0.0;
  double order = 0.0;
  bool exact = false;     // consecutive values identical to roundoff
  bool fallback = false;  // no stable order; estimate is the last value
};
LimitFit limit_extrapolate(const std::vector<std::pair<double, double>>& samples);

// Centered finite differences of eval_u only, Richardson-extrapolated.
DerivativeStack fd_oracle(const PotentialField& F, const Vec& x, double h);

// |FD-Laplacian^(n/2-1) of the kernel field - (+-f)| / max(|f|, floor).
double pde_residual(const PotentialField& F, const Vec& x, double h);

const std::vector<std::string>& check_registry();

// Empty string when the check's hypotheses hold for the scenario; otherwise
// a machine-readable reason code (the check reports exploratory, never fail).
std::string check_hypothesis_reason(const std::string& id, int n, bool radial,
                                    bool nonneg, double alpha, bool has_grid);

std::vector<CheckReport> run_checks(const PotentialField& F,
                                    const ScenarioConfig& scenario,
                                    const std::vector<std::string>& selection,
                                    const std::map<std::string, double>& tol_overrides,
                                    par::Exec mode = par::default_exec());

// Structured-text (JSON) report; runtime_ms is excluded so reruns are
// byte-identical.
std::string render_report(const std::vector<CheckReport>& reports);

}  // namespace qcurv
