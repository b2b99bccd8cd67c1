#pragma once

#include <optional>

#include "qcurv/potential.hpp"

namespace qcurv {

// All pointwise curvature quantities of g = e^{2u}|dx|^2 at one point.
struct PointCurvature {
  DerivativeStack stack;
  double R = 0.0;     // scalar curvature
  double Q2 = 0.0;    // (n-2)/(4(n-1)) R
  std::optional<double> Q4;  // n >= 6 only
  double Qtop = 0.0;  // Q^(n) = f e^{-nu}
  std::array<double, kMaxDim * kMaxDim> ric{};  // coordinate matrix of Ric_g
  std::array<double, kMaxDim> ric_eigs{};       // eigenvalues w.r.t. g, descending
  std::array<double, kMaxDim + 1> sigma{};      // sigma[k], k = 0..n
  double b = 0.0;
  std::optional<double> h;  // n >= 6

  double ric_at(int i, int j) const { return ric[i * kMaxDim + j]; }
};

PointCurvature point_curvature(const PotentialField& F, const Vec& x);

// b = (-alpha/(n-2)) lap u - |grad u|^2, the identity route.
double b_identity(const PotentialField& F, const Vec& x);

// h solved from <grad u, grad lap u> = -alpha/(2(n-4)) bilap - (lap)^2/(n-2)
// + (n-2) h; requires n >= 6.
double h_identity(const PotentialField& F, const Vec& x);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

// Monte-Carlo double integral for b, sampling y, z independently from the
// normalized density mixture. Requires a nonnegative density.
McEstimate b_doubleint(const CurvatureDensity& d, const Vec& x,
                       std::size_t samples, std::uint64_t seed,
                       par::Exec mode = par::default_exec());

// Monte-Carlo double integral for h with importance sampling on the
// |x-z|^{-4} factor. Requires n >= 6 and a nonnegative density.
McEstimate h_doubleint(const CurvatureDensity& d, const Vec& x,
                       std::size_t samples, std::uint64_t seed,
                       par::Exec mode = par::default_exec());

// The two structure inequalities at a point (n >= 6): caller asserts
// lhs1 <= rhs1 + tol and lhs2 >= rhs2 - tol.
struct StructureInequalities {
  double lhs1 = 0.0, rhs1 = 0.0;  // <grad u, grad b>  vs  2/(n-2)(-lap)b + h
  double lhs2 = 0.0, rhs2 = 0.0;  // -lap b            vs  2(n-6) h
};

StructureInequalities structure_inequalities(const PotentialField& F,
                                             const Vec& x);

// Symmetric eigenvalues (Jacobi sweeps), descending order.
void symmetric_eigenvalues(const double* a, int n, double* eigs);

// Elementary symmetric polynomials e_0..e_n of the given values.
void elementary_symmetric(const double* vals, int n, double* e);

}  // namespace qcurv
