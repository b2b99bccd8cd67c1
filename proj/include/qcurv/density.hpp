#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/rng.hpp"

namespace qcurv {

using Vec = std::array<double, kMaxDim>;

inline Vec zero_vec() { return Vec{}; }

inline double norm2(const Vec& v, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += v[i] * v[i];
  return s;
}

inline double norm(const Vec& v, int n) { return std::sqrt(norm2(v, n)); }

inline double dot(const Vec& a, const Vec& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

enum class Profile { gaussian, polybump, spheredensity };

struct BumpSpec {
  Profile profile = Profile::gaussian;
  Vec center{};
  double scale = 1.0;
  double weight = 1.0;
};

// Prescribed curvature density f = Q^(n) e^{nu}: a signed mixture of radial
// bumps with analytic masses.
class CurvatureDensity {
 public:
  CurvatureDensity() = default;

  int dimension() const { return n_; }
  const std::vector<BumpSpec>& bumps() const { return bumps_; }

  double eval(const Vec& x) const;

  // Signed total mass, sum of analytic per-bump masses.
  double mass() const { return mass_; }
  double abs_mass() const { return abs_mass_; }
  double bump_mass(std::size_t b) const { return bump_mass_[b]; }

  // alpha = 2 mass / ((n-1)! |S^n|)
  double alpha() const;
  double bump_alpha(std::size_t b) const;

  // Radius R with tail |f|-mass outside B_R at most tail_mass_tol * |f|-mass.
  double support_radius(double tail_mass_tol) const;

  bool is_radial() const;  // every center at the origin
  bool is_nonnegative() const;
  bool is_zero() const { return bumps_.empty() || abs_mass_ == 0.0; }

  // Profile value and radial derivative at distance t from the bump center.
  static double profile_value(const BumpSpec& b, double t, int n);
  static double profile_derivative(const BumpSpec& b, double t, int n);
  static double profile_mass(const BumpSpec& b, int n);
  // Radius beyond which the bump's |mass| tail is below frac * |mass|.
  static double profile_tail_radius(const BumpSpec& b, int n, double frac);

  // Draw a point of bump b (unit-mass profile as probability density).
  Vec sample_bump(std::size_t b, Rng& rng) const;
  // Mixture sample with probability proportional to |mass_b|; requires a
  // nonnegative density.
  Vec sample(Rng& rng) const;
  // Mixture probability density f(x)/mass (nonnegative densities).
  double pdf(const Vec& x) const;

  friend CurvatureDensity build_density(int dimension,
                                        std::vector<BumpSpec> bumps,
                                        const double* alpha_target);

 private:
  int n_ = 4;
  std::vector<BumpSpec> bumps_;
  std::vector<double> bump_mass_;
  double mass_ = 0.0;
  double abs_mass_ = 0.0;
};

// Validates the bump parameters and applies the optional uniform alpha rescale.
CurvatureDensity build_density(int dimension, std::vector<BumpSpec> bumps,
                               const double* alpha_target = nullptr);

}  // namespace qcurv
