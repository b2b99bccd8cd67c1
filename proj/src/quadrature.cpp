#include "qcurv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace qcurv {

namespace {

// Gauss-Kronrod 7-15 abscissae/weights (positive half; node 0 last).
constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// Gauss-7 weights aligned with odd Kronrod indices (1,3,5,7).
constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double err_norm;  // refinement priority
  std::vector<double> value;
  std::vector<double> error;
  std::vector<double> resabs;  // integral of |f|, for the roundoff floor
  bool operator<(const Interval& o) const { return err_norm < o.err_norm; }
};

void gk15_vec(const std::function<void(double, double*)>& f, std::size_t dim,
              double a, double b, std::vector<double>& value,
              std::vector<double>& error, std::vector<double>& resabs,
              std::size_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::vector<double> fv(dim), acc_k(dim, 0.0), acc_g(dim, 0.0),
      acc_abs(dim, 0.0);

  auto accumulate = [&](int i) {
    for (std::size_t k = 0; k < dim; ++k) {
      acc_k[k] += kKronrodW[i] * fv[k];
      acc_abs[k] += kKronrodW[i] * std::abs(fv[k]);
    }
    if (i == 7)
      for (std::size_t k = 0; k < dim; ++k) acc_g[k] += kGaussW[3] * fv[k];
    else if (i % 2 == 1)
      for (std::size_t k = 0; k < dim; ++k)
        acc_g[k] += kGaussW[i / 2] * fv[k];
  };

  for (int i = 0; i < 8; ++i) {
    const double dx = h * kKronrodX[i];
    if (i == 7) {
      f(c, fv.data());
      ++evals;
      accumulate(i);
      continue;
    }
    f(c - dx, fv.data());
    ++evals;
    accumulate(i);
    f(c + dx, fv.data());
    ++evals;
    accumulate(i);
  }

  value.assign(dim, 0.0);
  error.assign(dim, 0.0);
  resabs.assign(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    value[k] = h * acc_k[k];
    resabs[k] = std::abs(h) * acc_abs[k];
    const double diff = h * (acc_k[k] - acc_g[k]);
    // quadpack-style sharpened estimate
    error[k] = std::abs(diff);
    if (error[k] > 0.0) {
      const double scaled = std::pow(200.0 * error[k], 1.5);
      error[k] = std::min(error[k], scaled);
    }
  }
}

}  // namespace

VecQuadResult integrate_adaptive_vec(
    const std::function<void(double, double*)>& f, std::size_t dim, double a,
    double b, double rel_tol, double abs_tol, int max_subdivisions,
    const std::vector<double>& breaks) {
  VecQuadResult out;
  out.value.assign(dim, 0.0);
  out.error.assign(dim, 0.0);
  if (a == b) return out;

  std::vector<double> pts{a, b};
  for (double p : breaks)
    if (p > a && p < b) pts.push_back(p);
  std::sort(pts.begin(), pts.end());

  std::priority_queue<Interval> queue;
  std::vector<double> total(dim, 0.0), toterr(dim, 0.0), totabs(dim, 0.0);

  auto push_interval = [&](double lo, double hi) {
    Interval iv;
    iv.a = lo;
    iv.b = hi;
    gk15_vec(f, dim, lo, hi, iv.value, iv.error, iv.resabs, out.evaluations);
    iv.err_norm = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      iv.err_norm = std::max(iv.err_norm, iv.error[k]);
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] += iv.value[k];
      toterr[k] += iv.error[k];
      totabs[k] += iv.resabs[k];
    }
    queue.push(std::move(iv));
  };

  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    push_interval(pts[i], pts[i + 1]);

  // component converged when below its tolerance or its roundoff floor
  auto all_converged = [&]() {
    constexpr double eps = 2.22e-16;
    for (std::size_t k = 0; k < dim; ++k) {
      const double tol = std::max({abs_tol, rel_tol * std::abs(total[k]),
                                   50.0 * eps * totabs[k]});
      if (toterr[k] > tol) return false;
    }
    return true;
  };

  int subdivisions = static_cast<int>(pts.size()) - 1;
  while (!all_converged() && subdivisions < max_subdivisions) {
    Interval worst = queue.top();
    queue.pop();
    for (std::size_t k = 0; k < dim; ++k) {
      total[k] -= worst.value[k];
      toterr[k] -= worst.error[k];
      totabs[k] -= worst.resabs[k];
    }
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval exhausted at double precision; restore and stop splitting it
      for (std::size_t k = 0; k < dim; ++k) {
        total[k] += worst.value[k];
        toterr[k] += worst.error[k];
        totabs[k] += worst.resabs[k];
      }
      break;
    }
    push_interval(worst.a, mid);
    push_interval(mid, worst.b);
    ++subdivisions;
  }

  out.value = total;
  out.error = toterr;
  out.converged = all_converged();
  return out;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double rel_tol, double abs_tol,
                              int max_subdivisions,
                              const std::vector<double>& breaks) {
  auto wrap = [&f](double t, double* out) { out[0] = f(t); };
  VecQuadResult v = integrate_adaptive_vec(wrap, 1, a, b, rel_tol, abs_tol,
                                           max_subdivisions, breaks);
  QuadResult r;
  r.value = v.value[0];
  r.error = v.error[0];
  r.converged = v.converged;
  r.evaluations = v.evaluations;
  return r;
}

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, Newton iteration on P_n.
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

double gamma_q(double k, double x) {
  if (x <= 0.0) return 1.0;
  // Series for P(k,x) when x < k+1, continued fraction for Q otherwise.
  const double lg = std::lgamma(k);
  if (x < k + 1.0) {
    double term = 1.0 / k;
    double sum = term;
    for (int i = 1; i < 500; ++i) {
      term *= x / (k + i);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    const double p = sum * std::exp(-x + k * std::log(x) - lg);
    return 1.0 - p;
  }
  double b = x + 1.0 - k, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - k);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + k * std::log(x) - lg) * h;
}

}  // namespace qcurv
