#pragma once

namespace qcurv {

// Spherical means over the unit direction of the logarithmic and power-law
// kernels: for |x| = rho and |y| = t,
//   klog = avg of log|x-y|,   k2 = avg of |x-y|^{-2},  k4 = avg of |x-y|^{-4}
//   kv   = d/drho klog,       km = d/drho k2,          kp = d/drho k4
// The average runs over the polar angle with weight sin^{n-2}.
struct KernelMeans {
  double klog = 0.0;
  double kv = 0.0;
  double k2 = 0.0;
  double km = 0.0;
  double k4 = 0.0;
  double kp = 0.0;
};

// Exact piecewise-rational forms, available for n = 4, 6, 8.
KernelMeans kernel_means_closed(int n, double rho, double t);

// Adaptive polar-angle quadrature route (any n >= 3); reference
// implementation for the closed forms and the generic power means.
// smooth_nodes is the Gauss-Legendre panel size used away from the diagonal.
KernelMeans kernel_means_quad(int n, double rho, double t, double rel_tol,
                              int smooth_nodes, int max_subdivisions);

// avg over the sphere |x| = rho of |x-y|^{-p} for |y| = t, general p > 0
// with p < n-1 (integrable across the diagonal).
double angular_mean_pow(int n, double rho, double t, double p, double rel_tol,
                        int max_subdivisions);

}  // namespace qcurv
