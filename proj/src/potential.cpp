#include "qcurv/potential.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "qcurv/kernels.hpp"
#include "qcurv/quadrature.hpp"

namespace qcurv {

namespace {

// two-point Hermite with value and three derivatives per end (C^3 data);
// h_{0,j}(t) = (t^j/j!)(1-t)^4 sum_{i<=3-j} C(3+i,i) t^i, mirrored on the right
double hermite7(double x, double a, double b, const double* f0,
                const double* f1) {
  const double h = b - a;
  const double t = (x - a) / h;
  const double s = 1.0 - t;
  const double t2 = t * t, t3 = t2 * t;
  const double s2 = s * s, s3 = s2 * s;
  const double q0 = s2 * s2, q1 = t2 * t2;
  const double h00 = q0 * (1.0 + 4.0 * t + 10.0 * t2 + 20.0 * t3);
  const double h01 = t * q0 * (1.0 + 4.0 * t + 10.0 * t2);
  const double h02 = 0.5 * t2 * q0 * (1.0 + 4.0 * t);
  const double h03 = t3 * q0 / 6.0;
  const double g00 = q1 * (1.0 + 4.0 * s + 10.0 * s2 + 20.0 * s3);
  const double g01 = s * q1 * (1.0 + 4.0 * s + 10.0 * s2);
  const double g02 = 0.5 * s2 * q1 * (1.0 + 4.0 * s);
  const double g03 = s3 * q1 / 6.0;
  return f0[0] * h00 + f0[1] * h * h01 + f0[2] * h * h * h02 +
         f0[3] * h * h * h * h03 + f1[0] * g00 - f1[1] * h * g01 +
         f1[2] * h * h * g02 - f1[3] * h * h * h * g03;
}

double hermite5(double x, double a, double b, double f0, double d0, double s0,
                double f1, double d1, double s1) {
  const double h = b - a;
  const double t = (x - a) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double H0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double H1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double H3 = 0.5 * t3 - t4 + 0.5 * t5;
  const double H4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double H5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  return f0 * H0 + d0 * h * H1 + s0 * h * h * H2 + s1 * h * h * H3 +
         d1 * h * H4 + f1 * H5;
}

double hermite3(double x, double a, double b, double f0, double d0, double f1,
                double d1) {
  const double h = b - a;
  const double t = (x - a) / h;
  const double t2 = t * t, t3 = t2 * t;
  return f0 * (2.0 * t3 - 3.0 * t2 + 1.0) + d0 * h * (t3 - 2.0 * t2 + t) +
         f1 * (-2.0 * t3 + 3.0 * t2) + d1 * h * (t3 - t2);
}

// spheredensity transfer functions, exact for every even n
RadialValues spheredensity_values(double w, int n, double r) {
  RadialValues rv;
  const double D = 1.0 + r * r;
  rv.U = -w * std::log(D);
  rv.V = -2.0 * w * r / D;
  rv.L = -2.0 * w * ((n - 2) * r * r + n) / (D * D);
  rv.M = 4.0 * w * r * ((n - 2) * r * r + (n + 2)) / (D * D * D);
  const double A = double(n - 2) * (n - 4);
  const double B = 2.0 * double(n - 4) * (n + 2);
  const double C = double(n) * (n + 2);
  const double poly = A * r * r * r * r + B * r * r + C;
  rv.P = 4.0 * w * poly / (D * D * D * D);
  rv.dP = 4.0 * w *
          ((4.0 * A * r * r * r + 2.0 * B * r) * D - 8.0 * r * poly) /
          (D * D * D * D * D);
  return rv;
}

}  // namespace

RadialValues BumpTable::eval(double r, int n) const {
  if (closed_form) return spheredensity_values(spec.weight, n, r);

  RadialValues rv;
  const std::size_t N = rho.size();
  if (r >= rho_max) {
    // far field: U = -A log r - B/r^2 matched to the table boundary,
    // power laws for the kernel fields
    const double pm = rho_max;
    const double Um = U[N - 1], Vm = V[N - 1];
    const double lg = std::log(pm);
    const double B = -pm * pm * (Um - Vm * pm * lg) / (2.0 * lg + 1.0);
    const double A = -Vm * pm + 2.0 * B / (pm * pm);
    const double q = pm / r;
    rv.U = -A * std::log(r) - B / (r * r);
    rv.V = -A / r + 2.0 * B / (r * r * r);
    rv.L = L[N - 1] * q * q;
    rv.M = M[N - 1] * q * q * q;
    rv.P = P.empty() ? 0.0 : P[N - 1] * q * q * q * q;
    rv.dP = dP.empty() ? 0.0 : dP[N - 1] * q * q * q * q * q;
    return rv;
  }

  std::size_t j = 0;
  if (r > rho_min) {
    j = 1 + static_cast<std::size_t>(std::log(r / rho_min) / log_step);
    if (j > N - 2) j = N - 2;
    while (j > 0 && r < rho[j]) --j;
    while (j + 2 < N && r > rho[j + 1]) ++j;
  }
  const double a = rho[j], b = rho[j + 1];
  const double ua[4] = {U[j], V[j], U2[j], U3[j]};
  const double ub[4] = {U[j + 1], V[j + 1], U2[j + 1], U3[j + 1]};
  rv.U = hermite7(r, a, b, ua, ub);
  rv.V = hermite5(r, a, b, V[j], U2[j], U3[j], V[j + 1], U2[j + 1], U3[j + 1]);
  rv.L = hermite5(r, a, b, L[j], M[j], L2[j], L[j + 1], M[j + 1], L2[j + 1]);
  rv.M = hermite3(r, a, b, M[j], L2[j], M[j + 1], L2[j + 1]);
  if (!P.empty()) {
    rv.P = hermite3(r, a, b, P[j], dP[j], P[j + 1], dP[j + 1]);
    const double t = (r - a) / (b - a);
    rv.dP = dP[j] + t * (dP[j + 1] - dP[j]);
  }
  return rv;
}

namespace {

struct NodeKernels {
  double Tlog = 0.0, Tv = 0.0, T2 = 0.0, Tm = 0.0, T4 = 0.0, Tp = 0.0;
};

// Radial transfer integrals of one bump at evaluation radius rho:
// int phi(t) t^{n-1} K(rho, t) dt for each kernel mean K.
NodeKernels radial_transfer(const BumpSpec& spec, int n, double rho,
                            double tmax, const QuadConfig& q,
                            KernelRoute route, bool& ok, std::string& what) {
  const bool want4 = n >= 6;
  const std::size_t dim = want4 ? 6 : 4;
  const double ang_tol = 0.05 * q.rel_tol;

  auto f = [&](double t, double* out) {
    const double w =
        CurvatureDensity::profile_value(spec, t, n) * std::pow(t, n - 1);
    KernelMeans k;
    if (route == KernelRoute::closed_means)
      k = kernel_means_closed(n, rho, t);
    else
      k = kernel_means_quad(n, rho, t, ang_tol, q.angular_nodes,
                            q.max_subdivisions);
    out[0] = w * k.klog;
    out[1] = w * k.kv;
    out[2] = w * k.k2;
    out[3] = w * k.km;
    if (want4) {
      out[4] = w * k.k4;
      out[5] = w * k.kp;
    }
  };

  std::vector<double> breaks;
  if (rho > 0.0 && rho < tmax) breaks.push_back(rho);
  if (spec.profile == Profile::polybump && spec.scale < tmax)
    breaks.push_back(spec.scale);

  VecQuadResult r = integrate_adaptive_vec(f, dim, 0.0, tmax, q.rel_tol,
                                           q.abs_tol, q.max_subdivisions,
                                           breaks);
  if (!r.converged) {
    static const char* names[6] = {"U", "V", "L", "M", "P", "dP"};
    constexpr double eps = 2.22e-16;
    for (std::size_t k = 0; k < dim; ++k) {
      const double tol = std::max(
          {q.abs_tol, q.rel_tol * std::abs(r.value[k]), 50.0 * eps});
      if (r.error[k] > tol) what = names[k];
    }
    ok = false;
  }
  NodeKernels nk;
  nk.Tlog = r.value[0];
  nk.Tv = r.value[1];
  nk.T2 = r.value[2];
  nk.Tm = r.value[3];
  if (want4) {
    nk.T4 = r.value[4];
    nk.Tp = r.value[5];
  }
  return nk;
}

}  // namespace

PotentialField build_field(const CurvatureDensity& d, const QuadConfig& q,
                           KernelRoute route, par::Exec mode) {
  if (q.rel_tol <= 0.0 || q.abs_tol <= 0.0)
    throw ConfigError("quadrature tolerances must be positive");
  if (q.angular_nodes < 16)
    throw ConfigError("angular_nodes must be at least 16");
  if (q.table_nodes < 16) throw ConfigError("table_nodes must be at least 16");
  if (q.table_rho_max <= 0.0)
    throw ConfigError("table_rho_max must be positive");

  PotentialField F;
  F.density_ = d;
  F.quad_ = q;
  F.n_ = d.dimension();
  F.c0_ = log_kernel_norm(F.n_);
  F.kappa_ = 0.0;

  const int n = F.n_;
  const double c0s = F.c0_ * sphere_volume(n - 1);

  for (std::size_t bi = 0; bi < d.bumps().size(); ++bi) {
    const BumpSpec& spec = d.bumps()[bi];
    BumpTable tab;
    tab.spec = spec;
    tab.mass = d.bump_mass(bi);

    if (spec.profile == Profile::spheredensity) {
      tab.closed_form = true;
      // kappa share is exactly zero for this profile
      F.tables_.push_back(std::move(tab));
      continue;
    }

    const double tmax = CurvatureDensity::profile_tail_radius(
        spec, n, std::min(1e-18, 1e-6 * q.rel_tol));

    // log-spaced grid with a leading [0, rho_min] interval
    const int N = q.table_nodes;
    tab.rho_min = 1e-3 * std::min(1.0, spec.scale);
    tab.rho_max = q.table_rho_max;
    tab.log_step = std::log(tab.rho_max / tab.rho_min) / (N - 2);
    tab.rho.resize(N);
    tab.rho[0] = 0.0;
    for (int j = 1; j < N; ++j)
      tab.rho[j] = tab.rho_min * std::exp((j - 1) * tab.log_step);
    tab.rho[N - 1] = tab.rho_max;

    tab.U.resize(N);
    tab.V.resize(N);
    tab.U2.resize(N);
    tab.U3.resize(N);
    tab.L.resize(N);
    tab.M.resize(N);
    tab.L2.resize(N);
    tab.P.resize(N);
    tab.dP.resize(N);

    std::atomic<bool> ok{true};
    std::vector<std::string> bad_field(N);
    par::for_each_index(
        static_cast<std::size_t>(N),
        [&](std::size_t j) {
          bool node_ok = true;
          NodeKernels nk = radial_transfer(spec, n, tab.rho[j], tmax, q,
                                           route, node_ok, bad_field[j]);
          if (!node_ok) ok = false;
          tab.U[j] = -c0s * nk.Tlog;
          tab.V[j] = -c0s * nk.Tv;
          tab.L[j] = -(n - 2) * c0s * nk.T2;
          tab.M[j] = -(n - 2) * c0s * nk.Tm;
          if (n >= 6) {
            tab.P[j] = 2.0 * (n - 2) * (n - 4) * c0s * nk.T4;
            tab.dP[j] = 2.0 * (n - 2) * (n - 4) * c0s * nk.Tp;
          } else {
            // (-Delta)^2 u = f pointwise when n = 4
            tab.P[j] = CurvatureDensity::profile_value(spec, tab.rho[j], n);
            tab.dP[j] =
                CurvatureDensity::profile_derivative(spec, tab.rho[j], n);
          }
        },
        mode);
    if (!ok) {
      std::string field = "U";
      for (const auto& s : bad_field)
        if (!s.empty()) field = s;
      throw BuildError("quadrature did not converge for bump " +
                       std::to_string(bi) + " field " + field);
    }

    // second-derivative node data from the radial identities
    for (int j = 0; j < N; ++j) {
      const double r = tab.rho[j];
      if (j == 0) {
        tab.U2[j] = tab.L[j] / n;
        tab.U3[j] = 0.0;
        tab.L2[j] = tab.P[j] / n;
      } else {
        tab.U2[j] = tab.L[j] - (n - 1) * tab.V[j] / r;
        tab.U3[j] = tab.M[j] - (n - 1) * (tab.U2[j] - tab.V[j] / r) / r;
        tab.L2[j] = tab.P[j] - (n - 1) * tab.M[j] / r;
      }
    }

    // kappa share: c0 int log|y| phi(|y - c|) dy
    {
      const double off = norm(spec.center, n);
      auto kf = [&](double t) {
        const double w =
            CurvatureDensity::profile_value(spec, t, n) * std::pow(t, n - 1);
        if (off == 0.0) return t > 0.0 ? w * std::log(t) : 0.0;
        const KernelMeans k =
            route == KernelRoute::closed_means
                ? kernel_means_closed(n, off, t)
                : kernel_means_quad(n, off, t, 0.05 * q.rel_tol,
                                    q.angular_nodes, q.max_subdivisions);
        return w * k.klog;
      };
      std::vector<double> breaks;
      if (off > 0.0 && off < tmax) breaks.push_back(off);
      QuadResult kr = integrate_adaptive(kf, 0.0, tmax, q.rel_tol, q.abs_tol,
                                         q.max_subdivisions, breaks);
      if (!kr.converged)
        throw BuildError("quadrature did not converge for bump " +
                         std::to_string(bi) + " field kappa");
      F.kappa_ += c0s * kr.value;
    }

    F.tables_.push_back(std::move(tab));
  }

  return F;
}

double PotentialField::eval_u(const Vec& x) const {
  double u = kappa_;
  for (const auto& tab : tables_) {
    Vec r = x;
    for (int i = 0; i < n_; ++i) r[i] -= tab.spec.center[i];
    u += tab.eval(norm(r, n_), n_).U;
  }
  return u;
}

DerivativeStack PotentialField::eval_stack(const Vec& x) const {
  DerivativeStack st;
  st.n = n_;
  st.u = kappa_;
  for (const auto& tab : tables_) {
    Vec r = x;
    for (int i = 0; i < n_; ++i) r[i] -= tab.spec.center[i];
    const double rho = norm(r, n_);
    const RadialValues rv = tab.eval(rho, n_);
    st.u += rv.U;
    st.lap += rv.L;
    if (n_ >= 6) st.bilap += rv.P;
    if (rho == 0.0) {
      for (int i = 0; i < n_; ++i) st.hess_at(i, i) += rv.L / n_;
      continue;
    }
    const double inv = 1.0 / rho;
    const double B = rv.V * inv;
    const double A = rv.L - (n_ - 1) * B;  // radial second derivative
    for (int i = 0; i < n_; ++i) {
      const double di = r[i] * inv;
      st.grad[i] += rv.V * di;
      st.grad_lap[i] += rv.M * di;
      st.hess_at(i, i) += B;
      for (int j = 0; j < n_; ++j)
        st.hess_at(i, j) += (A - B) * di * (r[j] * inv);
    }
  }
  if (n_ == 4) st.bilap = density_.eval(x);
  return st;
}

RadialValues PotentialField::radial_values(double rho) const {
  if (!density_.is_radial())
    throw ContractError("radial fast path requires a radial density");
  RadialValues total;
  for (const auto& tab : tables_) {
    const RadialValues rv = tab.eval(rho, n_);
    total.U += rv.U;
    total.V += rv.V;
    total.L += rv.L;
    total.M += rv.M;
    total.P += rv.P;
    total.dP += rv.dP;
  }
  if (n_ == 4) {
    Vec x{};
    x[0] = rho;
    total.P = density_.eval(x);
  }
  return total;
}

double PotentialField::u_radial(double rho) const {
  if (!density_.is_radial())
    throw ContractError("radial fast path requires a radial density");
  double u = kappa_;
  for (const auto& tab : tables_) u += tab.eval(rho, n_).U;
  return u;
}

std::vector<std::array<double, 6>> PotentialField::radial_profile(
    const std::vector<double>& radii) const {
  if (!density_.is_radial())
    throw ContractError("radial_profile requires a radial density");
  std::vector<std::array<double, 6>> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    RadialValues rv = radial_values(r);
    rows.push_back({r, kappa_ + rv.U, rv.V, rv.L, rv.M, rv.P});
  }
  return rows;
}

void PotentialField::export_tables_csv(const std::string& path) const {
  std::ofstream out(path);
  out << "rho,U,V,L,M,P\n";
  char buf[512];
  if (density_.is_radial()) {
    std::vector<double> radii;
    if (!tables_.empty() && !tables_[0].rho.empty())
      radii = tables_[0].rho;
    else
      for (int i = 0; i <= 200; ++i) radii.push_back(0.05 * i);
    for (double r : radii) {
      RadialValues rv = radial_values(r);
      std::snprintf(buf, sizeof buf,
                    "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r,
                    kappa_ + rv.U, rv.V, rv.L, rv.M, rv.P);
      out << buf;
    }
    return;
  }
  for (const auto& tab : tables_) {
    for (std::size_t j = 0; j < tab.rho.size(); ++j) {
      std::snprintf(buf, sizeof buf,
                    "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", tab.rho[j],
                    tab.U[j], tab.V[j], tab.L[j], tab.M[j],
                    tab.P.empty() ? 0.0 : tab.P[j]);
      out << buf;
    }
  }
}

}  // namespace qcurv
