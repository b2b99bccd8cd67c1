#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qcurv {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

// Adaptive Gauss-Kronrod 7-15 on [a, b] with global worst-interval
// refinement. `breaks` inserts initial subdivision points (singularity or
// support seams).
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, double abs_tol,
                              int max_subdivisions,
                              const std::vector<double>& breaks = {});

// Vector version: f(t, out) fills `dim` components sharing one evaluation
// sweep. Refinement continues until every component meets
// err_k <= max(abs_tol, rel_tol * |I_k|).
struct VecQuadResult {
  std::vector<double> value;
  std::vector<double> error;
  bool converged = true;
  std::size_t evaluations = 0;
};

VecQuadResult integrate_adaptive_vec(
    const std::function<void(double, double*)>& f, std::size_t dim, double a,
    double b, double rel_tol, double abs_tol, int max_subdivisions,
    const std::vector<double>& breaks = {});

// Gauss-Legendre nodes/weights on [-1, 1], Newton on Legendre polynomials.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Regularized upper incomplete gamma Q(k, x) = Gamma(k, x)/Gamma(k) for
// integer or half-integer k (k = m/2, m >= 1). Used for gaussian tail mass.
double gamma_q(double k, double x);

}  // namespace qcurv
