#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcurv/curvature.hpp"

namespace qcurv {

struct IncompleteMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scalar field selector for sphere averages.
using FieldFn = std::function<double(const PotentialField&, const Vec&)>;

// Product quadrature nodes on S^3 in Hopf angles (n = 4 only).
struct SphereRule {
  std::vector<Vec> dirs;
  std::vector<double> weights;  // sum to 1
};
SphereRule hopf_sphere_rule(int eta_nodes, int xi_nodes);

// Average of a field over the sphere |x| = r. Radial densities take the
// exact pointwise path; non-radial is supported for n = 4 only. Node counts
// <= 0 derive from the field's quadrature configuration.
double sphere_average(const PotentialField& F, const FieldFn& field, double r,
                      int eta_nodes = 0, int xi_nodes = 0);

// Conformal volume of the Euclidean ball B_r(center) and boundary area.
double ball_volume(const PotentialField& F, double r,
                   const Vec& center = Vec{});
double sphere_area(const PotentialField& F, double r);

// V_g(dB_r)^{n/(n-1)} / (c_n^* V_g(B_r)) with the flat-normalizing constant;
// `alt` uses the printed constant |S^{n-1}|^{n/(n-1)}|S^n|^{-1} instead.
double isoperimetric_ratio(const PotentialField& F, double r,
                           bool alt = false);

// Measure distance delta_g(x, y).
double measure_distance(const PotentialField& F, const Vec& x, const Vec& y);

// d_g(0, rho e1) for radial metrics: integral of e^u along the ray.
double geodesic_distance_radial(const PotentialField& F, double rho);

// Total length of the ray to infinity; +inf when the metric is complete.
double radial_total_length(const PotentialField& F);
bool is_complete_radial(const PotentialField& F);

// Euclidean radius of the geodesic ball of radius r_g (radial metrics).
double geodesic_radius_invert(const PotentialField& F, double r_g);

// int_{B^g_{r_g}} |Q^(2k)|^p dmu_g and int sigma_k dmu_g (radial).
double curvature_growth_integral(const PotentialField& F, int k, double p,
                                 double r_g);
double sigma_growth_integral(const PotentialField& F, int k, double r_g);

struct GridConfig {
  double half_width = 8.0;
  int nodes_per_axis = 21;  // odd
  std::size_t node_budget = 2825761;  // 41^4
};

struct GridDistance {
  double raw = 0.0;         // lattice shortest path under e^u weights
  double flat = 0.0;        // same path problem with u = 0
  double calibrated = 0.0;  // raw * |x-y| / flat
  double error_estimate = 0.0;  // from one grid refinement
};

// Shortest path on the axis+diagonal lattice, n = 4 only; deterministic
// lexicographic tie-breaking.
GridDistance geodesic_distance_grid(const PotentialField& F, const Vec& x,
                                    const Vec& y, const GridConfig& grid,
                                    bool refine = true);

// One radius of a sweep.
struct RadialSweepRow {
  double r = 0.0;
  double ubar = 0.0;
  double e_ku_avg[2] = {0.0, 0.0};  // k = 1, 2 (ratio numerators)
  double r2_neglap = 0.0;
  double r2_gradsq = 0.0;
  double r2_R_e2u = 0.0;
  std::optional<double> r4_bilap;
  std::optional<double> r4_lapsq;
  std::optional<double> r4_Q4e4u;
  double vol_g = 0.0;
  double area_g = 0.0;
  double iso_ratio = 0.0;
  double iso_ratio_paper_cn = 0.0;
  std::optional<double> dist_g;
  // growth integrals at geodesic radius dist_g, p = 1
  std::vector<double> growth_Q2k;   // k = 1 .. (n-2)/2
  std::vector<double> growth_sigma; // k = 1 .. (n-2)/2
  double weighted_deriv = 0.0;  // r^2 avg(e^{(n-2)u}|grad u|^2) / e^{(n-2)ubar}
};

struct SweepConfig {
  double r_start = 1.0;
  double r_stop = 1e4;
  int count = 40;
};

std::vector<RadialSweepRow> run_sweep(const PotentialField& F,
                                      const SweepConfig& sweep,
                                      par::Exec mode = par::default_exec());

void write_sweep_csv(const std::string& path, const PotentialField& F,
                     const std::vector<RadialSweepRow>& rows);

}  // namespace qcurv
