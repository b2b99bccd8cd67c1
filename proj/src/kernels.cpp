#include "qcurv/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/quadrature.hpp"

namespace qcurv {

KernelMeans kernel_means_closed(int n, double rho, double t) {
  KernelMeans k;
  const bool inner = rho < t;  // evaluation radius inside the source sphere
  const double mx = inner ? t : rho;
  const double mn = inner ? rho : t;
  if (mx == 0.0) throw std::domain_error("kernel mean at coincident origin");
  const double r = mn / mx;
  const double r2 = r * r, r4 = r2 * r2;
  const double mx2 = mx * mx;

  switch (n) {
    case 4: {
      k.klog = std::log(mx) + 0.25 * r2;
      k.k2 = 1.0 / mx2;
      if (inner) {
        k.kv = rho / (2.0 * t * t);
        k.km = 0.0;
      } else {
        k.kv = 1.0 / rho - t * t / (2.0 * rho * rho * rho);
        k.km = -2.0 / (rho * rho * rho);
      }
      break;
    }
    case 6: {
      k.klog = std::log(mx) + r2 / 3.0 - r4 / 24.0;
      k.k2 = (1.0 - r2 / 3.0) / mx2;
      k.k4 = 1.0 / (mx2 * mx2);
      if (inner) {
        k.kv = 2.0 * rho / (3.0 * t * t) - rho * rho * rho / (6.0 * t * t * t * t);
        k.km = -2.0 * rho / (3.0 * t * t * t * t);
        k.kp = 0.0;
      } else {
        const double p2 = rho * rho, p3 = p2 * rho, p5 = p3 * p2;
        k.kv = 1.0 / rho - 2.0 * t * t / (3.0 * p3) + t * t * t * t / (6.0 * p5);
        k.km = -2.0 / p3 + 4.0 * t * t / (3.0 * p5);
        k.kp = -4.0 / p5;
      }
      break;
    }
    case 8: {
      const double r6 = r4 * r2;
      k.klog = std::log(mx) + 3.0 * r2 / 8.0 - 3.0 * r4 / 40.0 + r6 / 120.0;
      k.k2 = (1.0 - 0.5 * r2 + 0.1 * r4) / mx2;
      k.k4 = (1.0 - 0.5 * r2) / (mx2 * mx2);
      if (inner) {
        const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;
        const double p = rho, p3 = p * p * p, p5 = p3 * p * p;
        k.kv = 3.0 * p / (4.0 * t2) - 3.0 * p3 / (10.0 * t4) + p5 / (20.0 * t6);
        k.km = -p / t4 + 2.0 * p3 / (5.0 * t6);
        k.kp = -p / t6;
      } else {
        const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;
        const double p = rho, p3 = p * p * p, p5 = p3 * p * p, p7 = p5 * p * p;
        k.kv = 1.0 / p - 3.0 * t2 / (4.0 * p3) + 3.0 * t4 / (10.0 * p5) -
               t6 / (20.0 * p7);
        k.km = -2.0 / p3 + 2.0 * t2 / p5 - 3.0 * t4 / (5.0 * p7);
        k.kp = -4.0 / p5 + 3.0 * t2 / p7;
      }
      break;
    }
    default:
      throw std::domain_error("closed kernel means require n in {4, 6, 8}");
  }
  return k;
}

namespace {

// int_0^pi sin^{n-2} theta dtheta
double angular_weight_total(int n) {
  return std::sqrt(kPi) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
}

std::vector<double> diagonal_breaks(double rho, double t) {
  std::vector<double> breaks;
  const double mx = rho > t ? rho : t;
  if (mx <= 0.0) return breaks;
  const double delta = std::abs(rho - t) / mx;
  if (delta < 0.25) {
    double th = std::max(2.0 * delta, 1e-8);
    while (th < 1.0) {
      breaks.push_back(th);
      th *= 8.0;
    }
    breaks.push_back(2.0);
  }
  return breaks;
}

}  // namespace

KernelMeans kernel_means_quad(int n, double rho, double t, double rel_tol,
                              int smooth_nodes, int max_subdivisions) {
  const bool want4 = n >= 6;
  const std::size_t dim = want4 ? 6 : 4;
  const double a2 = (rho - t) * (rho - t);
  const double fourpt = 4.0 * rho * t;

  auto integrand = [&](double theta, double* out) {
    const double s = std::sin(0.5 * theta);
    const double r2 = a2 + fourpt * s * s;  // |x-y|^2, stable near diagonal
    const double w = std::pow(std::sin(theta), n - 2);
    const double rad = rho - t * std::cos(theta);
    const double inv2 = 1.0 / r2;
    out[0] = w * 0.5 * std::log(r2);
    out[1] = w * rad * inv2;
    out[2] = w * inv2;
    out[3] = w * (-2.0) * rad * inv2 * inv2;
    if (want4) {
      out[4] = w * inv2 * inv2;
      out[5] = w * (-4.0) * rad * inv2 * inv2 * inv2;
    }
  };

  const double mx = rho > t ? rho : t;
  const double delta = mx > 0.0 ? std::abs(rho - t) / mx : 1.0;
  std::vector<double> value(dim);
  if (delta >= 0.25 && smooth_nodes >= 2) {
    // far from the diagonal the integrand is analytic; one Gauss panel
    static thread_local int cached_n = -1;
    static thread_local std::vector<double> gx, gw;
    if (cached_n != smooth_nodes) {
      gauss_legendre(smooth_nodes, gx, gw);
      cached_n = smooth_nodes;
    }
    std::vector<double> f(dim);
    std::fill(value.begin(), value.end(), 0.0);
    for (int i = 0; i < smooth_nodes; ++i) {
      const double theta = 0.5 * kPi * (gx[i] + 1.0);
      integrand(theta, f.data());
      for (std::size_t k = 0; k < dim; ++k) value[k] += gw[i] * f[k];
    }
    for (std::size_t k = 0; k < dim; ++k) value[k] *= 0.5 * kPi;
  } else {
    VecQuadResult q = integrate_adaptive_vec(integrand, dim, 0.0, kPi, rel_tol,
                                             0.0, max_subdivisions,
                                             diagonal_breaks(rho, t));
    value = q.value;
  }

  const double inv_w = 1.0 / angular_weight_total(n);
  KernelMeans k;
  k.klog = value[0] * inv_w;
  k.kv = value[1] * inv_w;
  k.k2 = value[2] * inv_w;
  k.km = value[3] * inv_w;
  if (want4) {
    k.k4 = value[4] * inv_w;
    k.kp = value[5] * inv_w;
  }
  return k;
}

double angular_mean_pow(int n, double rho, double t, double p, double rel_tol,
                        int max_subdivisions) {
  if (p <= 0.0 || p >= n - 1)
    throw std::domain_error("angular_mean_pow requires 0 < p < n-1");
  const double a2 = (rho - t) * (rho - t);
  const double fourpt = 4.0 * rho * t;
  auto f = [&](double theta) {
    const double s = std::sin(0.5 * theta);
    const double r2 = a2 + fourpt * s * s;
    return std::pow(std::sin(theta), n - 2) * std::pow(r2, -0.5 * p);
  };
  QuadResult q = integrate_adaptive(f, 0.0, kPi, rel_tol, 0.0,
                                    max_subdivisions, diagonal_breaks(rho, t));
  return q.value / angular_weight_total(n);
}

}  // namespace qcurv
