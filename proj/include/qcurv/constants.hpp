#pragma once

#include <cmath>
#include <cstddef>

namespace qcurv {

inline constexpr int kMaxDim = 8;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Volume of the unit k-sphere S^k = {x in R^{k+1} : |x| = 1}.
inline double sphere_volume(int k) {
  // |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  return 2.0 * std::pow(kPi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

inline double factorial(int m) {
  double r = 1.0;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

// Normalization 2 / ((n-1)! |S^n|) in front of the logarithmic kernel.
inline double log_kernel_norm(int n) {
  return 2.0 / (factorial(n - 1) * sphere_volume(n));
}

// Ball volume |B_r| in R^n.
inline double ball_volume_flat(int n, double r) {
  return sphere_volume(n - 1) * std::pow(r, n) / n;
}

// Constant making the flat isoperimetric ratio exactly 1.
inline double iso_norm_flat(int n) {
  return n * std::pow(sphere_volume(n - 1), 1.0 / (n - 1));
}

// The printed constant |S^{n-1}|^{n/(n-1)} |S^n|^{-1}; kept as a second
// diagnostic normalization.
inline double iso_norm_alt(int n) {
  return std::pow(sphere_volume(n - 1), double(n) / (n - 1)) / sphere_volume(n);
}

}  // namespace qcurv
