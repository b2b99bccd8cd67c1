#include "qcurv/density.hpp"

#include <algorithm>
#include <cmath>

#include "qcurv/quadrature.hpp"

namespace qcurv {

namespace {

// Regularized incomplete beta I_v(k, k) for integer k (binomial sum).
double inc_beta_kk(int k, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  const int m = 2 * k - 1;
  double sum = 0.0;
  for (int j = k; j <= m; ++j) {
    double binom = 1.0;
    for (int i = 0; i < j; ++i) binom = binom * (m - i) / (i + 1);
    sum += binom * std::pow(v, j) * std::pow(1.0 - v, m - j);
  }
  return sum;
}

// Fraction of a unit-mass bump's |mass| lying outside radius R.
double tail_fraction(const BumpSpec& b, int n, double R) {
  if (R <= 0.0) return 1.0;
  switch (b.profile) {
    case Profile::polybump:
      if (R >= b.scale) return 0.0;
      {
        // int_R^s (1 - t^2/s^2)^4 t^{n-1} dt / int_0^s, by quadrature (only
        // used inside the bisection; exact endpoints handled above)
        auto f = [&](double t) {
          const double q = 1.0 - t * t / (b.scale * b.scale);
          return std::pow(q, 4) * std::pow(t, n - 1);
        };
        const double whole =
            integrate_adaptive(f, 0.0, b.scale, 1e-12, 1e-300, 200).value;
        const double tail =
            integrate_adaptive(f, R, b.scale, 1e-12, 1e-300, 200).value;
        return tail / whole;
      }
    case Profile::gaussian:
      return gamma_q(0.5 * n, 0.5 * R * R / (b.scale * b.scale));
    case Profile::spheredensity:
      return 1.0 - inc_beta_kk(n / 2, R * R / (1.0 + R * R));
  }
  return 0.0;
}

double bisect_tail_radius(const BumpSpec& b, int n, double frac) {
  double lo = 0.0, hi = b.scale;
  while (tail_fraction(b, n, hi) > frac && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail_fraction(b, n, mid) > frac)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  return hi;
}

}  // namespace

double CurvatureDensity::profile_value(const BumpSpec& b, double t, int n) {
  switch (b.profile) {
    case Profile::gaussian:
      return b.weight * std::exp(-0.5 * t * t / (b.scale * b.scale));
    case Profile::polybump: {
      const double q = 1.0 - t * t / (b.scale * b.scale);
      return q > 0.0 ? b.weight * q * q * q * q : 0.0;
    }
    case Profile::spheredensity:
      return b.weight * factorial(n - 1) *
             std::pow(2.0 / (1.0 + t * t), n);
  }
  return 0.0;
}

double CurvatureDensity::profile_derivative(const BumpSpec& b, double t,
                                            int n) {
  switch (b.profile) {
    case Profile::gaussian:
      return -b.weight * t / (b.scale * b.scale) *
             std::exp(-0.5 * t * t / (b.scale * b.scale));
    case Profile::polybump: {
      const double q = 1.0 - t * t / (b.scale * b.scale);
      return q > 0.0
                 ? -8.0 * b.weight * t / (b.scale * b.scale) * q * q * q
                 : 0.0;
    }
    case Profile::spheredensity:
      return -2.0 * n * t / (1.0 + t * t) * profile_value(b, t, n);
  }
  return 0.0;
}

double CurvatureDensity::profile_mass(const BumpSpec& b, int n) {
  switch (b.profile) {
    case Profile::gaussian:
      return b.weight * std::pow(2.0 * kPi * b.scale * b.scale, 0.5 * n);
    case Profile::polybump: {
      // |S^{n-1}| s^n Gamma(n/2) 4! / (2 Gamma(n/2 + 5))
      const double beta = std::tgamma(0.5 * n) * 24.0 /
                          (2.0 * std::tgamma(0.5 * n + 5.0));
      return b.weight * sphere_volume(n - 1) * std::pow(b.scale, n) * beta;
    }
    case Profile::spheredensity:
      return b.weight * factorial(n - 1) * sphere_volume(n);
  }
  return 0.0;
}

double CurvatureDensity::profile_tail_radius(const BumpSpec& b, int n,
                                             double frac) {
  if (b.profile == Profile::polybump) return b.scale;
  return bisect_tail_radius(b, n, frac);
}

CurvatureDensity build_density(int dimension, std::vector<BumpSpec> bumps,
                               const double* alpha_target) {
  if (dimension < 4 || dimension % 2 != 0 || dimension > kMaxDim)
    throw ConfigError("dimension must be an even integer in [4, " +
                      std::to_string(kMaxDim) + "], got " +
                      std::to_string(dimension));
  for (const auto& b : bumps) {
    if (!(b.scale > 0.0)) throw ConfigError("bump scale must be positive");
    if (b.profile == Profile::spheredensity) {
      if (norm2(b.center, dimension) != 0.0)
        throw ConfigError("spheredensity bump must be centered at the origin");
      if (b.scale != 1.0 || b.weight != 1.0)
        throw ConfigError("spheredensity scale and weight are fixed to 1");
    }
  }

  CurvatureDensity d;
  d.n_ = dimension;
  d.bumps_ = std::move(bumps);
  auto recompute = [&d, dimension]() {
    d.bump_mass_.clear();
    d.mass_ = d.abs_mass_ = 0.0;
    for (const auto& b : d.bumps_) {
      const double m = CurvatureDensity::profile_mass(b, dimension);
      d.bump_mass_.push_back(m);
      d.mass_ += m;
      d.abs_mass_ += std::abs(m);
    }
  };
  recompute();

  if (alpha_target) {
    const double a = d.alpha();
    if (a == 0.0) {
      if (*alpha_target != 0.0)
        throw ConfigError("alpha_target set but density has zero mass");
    } else {
      const double factor = *alpha_target / a;
      for (auto& b : d.bumps_) b.weight *= factor;
      recompute();
    }
  }
  return d;
}

double CurvatureDensity::eval(const Vec& x) const {
  double f = 0.0;
  for (const auto& b : bumps_) {
    Vec r = x;
    for (int i = 0; i < n_; ++i) r[i] -= b.center[i];
    f += profile_value(b, norm(r, n_), n_);
  }
  return f;
}

double CurvatureDensity::alpha() const {
  return log_kernel_norm(n_) * mass_;
}

double CurvatureDensity::bump_alpha(std::size_t b) const {
  return log_kernel_norm(n_) * bump_mass_[b];
}

double CurvatureDensity::support_radius(double tail_mass_tol) const {
  if (is_zero()) return 0.0;
  bool all_compact = true;
  double compact_r = 0.0;
  for (const auto& b : bumps_) {
    if (b.profile != Profile::polybump) all_compact = false;
    compact_r = std::max(compact_r, norm(b.center, n_) + b.scale);
  }
  if (all_compact) return compact_r;

  auto tail_mass = [&](double R) {
    double t = 0.0;
    for (std::size_t i = 0; i < bumps_.size(); ++i) {
      const double off = norm(bumps_[i].center, n_);
      t += std::abs(bump_mass_[i]) *
           tail_fraction(bumps_[i], n_, std::max(0.0, R - off));
    }
    return t;
  };
  const double target = tail_mass_tol * abs_mass_;
  double lo = 0.0, hi = 1.0;
  while (tail_mass(hi) > target && hi < 1e12) hi *= 2.0;
  for (int i = 0; i < 120; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tail_mass(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

bool CurvatureDensity::is_radial() const {
  for (const auto& b : bumps_)
    if (norm2(b.center, n_) != 0.0) return false;
  return true;
}

bool CurvatureDensity::is_nonnegative() const {
  for (const auto& b : bumps_)
    if (b.weight < 0.0) return false;
  return true;
}

Vec CurvatureDensity::sample_bump(std::size_t bi, Rng& rng) const {
  const BumpSpec& b = bumps_[bi];
  Vec x{};
  switch (b.profile) {
    case Profile::gaussian:
      for (int i = 0; i < n_; ++i) x[i] = b.center[i] + b.scale * rng.normal();
      return x;
    case Profile::polybump: {
      // rejection against the uniform ball
      for (;;) {
        Vec dir = rng.unit_vector(n_);
        const double t = b.scale * std::pow(rng.uniform(), 1.0 / n_);
        const double q = 1.0 - t * t / (b.scale * b.scale);
        if (rng.uniform() <= q * q * q * q) {
          for (int i = 0; i < n_; ++i) x[i] = b.center[i] + t * dir[i];
          return x;
        }
      }
    }
    case Profile::spheredensity: {
      // radial CDF I_v(n/2, n/2) with v = t^2/(1+t^2), inverted by bisection
      const double u = rng.uniform();
      double lo = 0.0, hi = 1.0;
      while (inc_beta_kk(n_ / 2, hi / (1.0 + hi)) < u && hi < 1e14) hi *= 2.0;
      // bisect on t^2
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (inc_beta_kk(n_ / 2, mid / (1.0 + mid)) < u)
          lo = mid;
        else
          hi = mid;
      }
      const double t = std::sqrt(0.5 * (lo + hi));
      Vec dir = rng.unit_vector(n_);
      for (int i = 0; i < n_; ++i) x[i] = t * dir[i];
      return x;
    }
  }
  return x;
}

Vec CurvatureDensity::sample(Rng& rng) const {
  if (!is_nonnegative())
    throw ContractError("sampling requires a nonnegative density");
  if (is_zero()) throw ContractError("cannot sample the zero density");
  double u = rng.uniform() * abs_mass_;
  for (std::size_t i = 0; i < bumps_.size(); ++i) {
    u -= std::abs(bump_mass_[i]);
    if (u <= 0.0) return sample_bump(i, rng);
  }
  return sample_bump(bumps_.size() - 1, rng);
}

double CurvatureDensity::pdf(const Vec& x) const {
  return eval(x) / mass_;
}

}  // namespace qcurv
