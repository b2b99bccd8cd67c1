#pragma once

#include <string>
#include <vector>

#include "qcurv/density.hpp"
#include "qcurv/parallel.hpp"

namespace qcurv {

// Default tolerances sized so that tabulation noise stays below the
// finite-difference oracles: third differences amplify node errors by
// 1/(node spacing)^3, so the transfer integrals carry ~1e-11 relative error.
struct QuadConfig {
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  int angular_nodes = 48;   // Gauss nodes in the polar angle, smooth regime
  int table_nodes = 1200;   // radial tabulation grid size
  double table_rho_max = 2.0e4;
};

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pointwise derivative data of u at one point.
struct DerivativeStack {
  int n = 4;
  double u = 0.0;
  Vec grad{};
  std::array<double, kMaxDim * kMaxDim> hess{};
  double lap = 0.0;
  Vec grad_lap{};
  double bilap = 0.0;

  double hess_at(int i, int j) const { return hess[i * kMaxDim + j]; }
  double& hess_at(int i, int j) { return hess[i * kMaxDim + j]; }
  double grad_norm2() const { return norm2(grad, n); }
  double hess_trace() const {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += hess_at(i, i);
    return t;
  }
  double hess_frobenius2() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += hess_at(i, j) * hess_at(i, j);
    return s;
  }
  // <grad u, Hess u grad u>
  double grad_hess_grad() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += grad[i] * hess_at(i, j) * grad[j];
    return s;
  }
};

// Values of the per-radius transfer functions of one bump (or of the whole
// radial field): potential, radial derivative, Laplacian, its radial
// derivative, bilaplacian and its radial derivative.
struct RadialValues {
  double U = 0.0;   // convolution part of u
  double V = 0.0;   // U'
  double L = 0.0;   // Laplacian
  double M = 0.0;   // L'
  double P = 0.0;   // bilaplacian
  double dP = 0.0;  // P'
};

enum class KernelRoute { quadrature, closed_means };

// Tabulated transfer functions of a single bump on a log-spaced radial grid.
struct BumpTable {
  BumpSpec spec;
  double mass = 0.0;
  bool closed_form = false;  // spheredensity: exact formulas, no table
  double rho_min = 1e-3;
  double rho_max = 2e4;
  double log_step = 0.0;
  std::vector<double> rho;
  // node data; quintic interpolation uses (value, d1, d2) per field
  std::vector<double> U, V, U2, U3, L, M, L2, P, dP;

  RadialValues eval(double r, int n) const;
};

// Immutable evaluator of u = L(f) and its derivative stack.
class PotentialField {
 public:
  PotentialField() = default;

  const CurvatureDensity& density() const { return density_; }
  const QuadConfig& quad() const { return quad_; }
  int dimension() const { return n_; }
  double kappa() const { return kappa_; }
  double alpha() const { return density_.alpha(); }
  const std::vector<BumpTable>& tables() const { return tables_; }

  double eval_u(const Vec& x) const;
  DerivativeStack eval_stack(const Vec& x) const;

  // Radial fast path: total field values at radius rho. Contract error for
  // non-radial densities.
  RadialValues radial_values(double rho) const;
  double u_radial(double rho) const;  // kappa + sum U_b(rho)

  // (rho, U, V, L, M, P) rows; U is the full potential including kappa.
  std::vector<std::array<double, 6>> radial_profile(
      const std::vector<double>& radii) const;

  // Debug table export, columns rho,U,V,L,M,P.
  void export_tables_csv(const std::string& path) const;

  friend PotentialField build_field(const CurvatureDensity& d,
                                    const QuadConfig& q, KernelRoute route,
                                    par::Exec mode);

 private:
  CurvatureDensity density_;
  QuadConfig quad_;
  int n_ = 4;
  double c0_ = 0.0;
  double kappa_ = 0.0;
  std::vector<BumpTable> tables_;
};

PotentialField build_field(const CurvatureDensity& d, const QuadConfig& q,
                           KernelRoute route = KernelRoute::quadrature,
                           par::Exec mode = par::default_exec());

}  // namespace qcurv
