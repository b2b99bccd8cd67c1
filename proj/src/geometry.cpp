#include "qcurv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>

#include "qcurv/quadrature.hpp"

namespace qcurv {

SphereRule hopf_sphere_rule(int eta_nodes, int xi_nodes) {
  // S^3 in Hopf angles: (cos a sin e, sin a sin e, cos b cos e, sin b cos e),
  // e in [0, pi/2], a, b in [0, 2pi); measure sin e cos e de da db.
  SphereRule rule;
  std::vector<double> gx, gw;
  gauss_legendre(eta_nodes, gx, gw);
  const double half = 0.25 * kPi;
  double wsum = 0.0;
  for (int ie = 0; ie < eta_nodes; ++ie) {
    const double eta = half * (gx[ie] + 1.0);
    const double we = gw[ie] * half * std::sin(eta) * std::cos(eta);
    for (int ia = 0; ia < xi_nodes; ++ia) {
      const double a = 2.0 * kPi * ia / xi_nodes;
      for (int ib = 0; ib < xi_nodes; ++ib) {
        const double b = 2.0 * kPi * ib / xi_nodes;
        Vec v{};
        v[0] = std::cos(a) * std::sin(eta);
        v[1] = std::sin(a) * std::sin(eta);
        v[2] = std::cos(b) * std::cos(eta);
        v[3] = std::sin(b) * std::cos(eta);
        rule.dirs.push_back(v);
        rule.weights.push_back(we);
        wsum += we;
      }
    }
  }
  for (double& w : rule.weights) w /= wsum;
  return rule;
}

namespace {

double sphere_avg_around(const PotentialField& F, const FieldFn& field,
                         const Vec& center, double r, int eta_nodes,
                         int xi_nodes) {
  if (F.dimension() != 4)
    throw ContractError(
        "non-radial sphere averages are supported for n = 4 only");
  static thread_local int cached_eta = -1, cached_xi = -1;
  static thread_local SphereRule rule;
  if (cached_eta != eta_nodes || cached_xi != xi_nodes) {
    rule = hopf_sphere_rule(eta_nodes, xi_nodes);
    cached_eta = eta_nodes;
    cached_xi = xi_nodes;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
    Vec x = center;
    for (int k = 0; k < 4; ++k) x[k] += r * rule.dirs[i][k];
    acc += rule.weights[i] * field(F, x);
  }
  return acc;
}

bool centered_radial(const PotentialField& F, const Vec& center) {
  return F.density().is_radial() && norm2(center, F.dimension()) == 0.0;
}

}  // namespace

double sphere_average(const PotentialField& F, const FieldFn& field, double r,
                      int eta_nodes, int xi_nodes) {
  if (F.density().is_radial()) {
    Vec x{};
    x[0] = r;
    return field(F, x);
  }
  // node counts default to the field's quadrature configuration
  if (eta_nodes <= 0) eta_nodes = std::max(12, F.quad().angular_nodes / 4);
  if (xi_nodes <= 0) xi_nodes = std::max(12, F.quad().angular_nodes / 4);
  return sphere_avg_around(F, field, Vec{}, r, eta_nodes, xi_nodes);
}

double ball_volume(const PotentialField& F, double r, const Vec& center) {
  const int n = F.dimension();
  if (centered_radial(F, center)) {
    auto f = [&](double s) {
      return std::exp(n * F.u_radial(s)) * std::pow(s, n - 1);
    };
    return sphere_volume(n - 1) *
           integrate_adaptive(f, 0.0, r, 1e-10, 1e-14, 2000).value;
  }
  if (F.density().is_zero()) return ball_volume_flat(n, r);
  FieldFn enu = [n](const PotentialField& FF, const Vec& x) {
    return std::exp(n * FF.eval_u(x));
  };
  auto f = [&](double s) {
    return sphere_avg_around(F, enu, center, s, 12, 12) * std::pow(s, n - 1);
  };
  return sphere_volume(n - 1) *
         integrate_adaptive(f, 0.0, r, 1e-8, 1e-12, 400).value;
}

double sphere_area(const PotentialField& F, double r) {
  const int n = F.dimension();
  FieldFn em = [n](const PotentialField& FF, const Vec& x) {
    return std::exp((n - 1) * FF.eval_u(x));
  };
  return sphere_volume(n - 1) * std::pow(r, n - 1) *
         sphere_average(F, em, r);
}

double isoperimetric_ratio(const PotentialField& F, double r, bool alt) {
  const int n = F.dimension();
  const double area = sphere_area(F, r);
  const double vol = ball_volume(F, r);
  const double c = alt ? iso_norm_alt(n) : iso_norm_flat(n);
  return std::pow(area, double(n) / (n - 1)) / (c * vol);
}

double measure_distance(const PotentialField& F, const Vec& x, const Vec& y) {
  const int n = F.dimension();
  Vec diff = x;
  for (int i = 0; i < n; ++i) diff[i] -= y[i];
  const double d = norm(diff, n);
  if (d == 0.0) return 0.0;
  if (F.density().is_zero())
    return std::pow(ball_volume_flat(n, 0.5 * d), 1.0 / n);
  Vec mid = x;
  for (int i = 0; i < n; ++i) mid[i] = 0.5 * (x[i] + y[i]);
  return std::pow(ball_volume(F, 0.5 * d, mid), 1.0 / n);
}

double geodesic_distance_radial(const PotentialField& F, double rho) {
  if (!F.density().is_radial())
    throw ContractError("geodesic_distance_radial requires a radial density");
  auto f = [&](double s) { return std::exp(F.u_radial(s)); };
  return integrate_adaptive(f, 0.0, rho, 1e-10, 1e-14, 2000).value;
}

namespace {

// end of tabulated range; spheredensity has closed forms everywhere
double radial_table_end(const PotentialField& F) {
  double end = 1e6;
  for (const auto& t : F.tables())
    if (!t.closed_form) end = std::min(end, t.rho_max);
  return end;
}

// s u'(s) at the far end; tends to -alpha
double far_slope(const PotentialField& F) {
  const double s = radial_table_end(F);
  return s * F.radial_values(s).V;
}

}  // namespace

bool is_complete_radial(const PotentialField& F) {
  if (!F.density().is_radial())
    throw ContractError("completeness diagnostic requires a radial density");
  if (F.density().is_zero()) return true;
  return far_slope(F) >= -1.0 - 1e-6;
}

double radial_total_length(const PotentialField& F) {
  if (is_complete_radial(F)) return std::numeric_limits<double>::infinity();
  const double end = radial_table_end(F);
  const double base = geodesic_distance_radial(F, end);
  const double beta = -far_slope(F);  // e^u ~ C s^{-beta}, beta > 1
  const double tail = std::exp(F.u_radial(end)) * end / (beta - 1.0);
  return base + tail;
}

double geodesic_radius_invert(const PotentialField& F, double r_g) {
  if (!F.density().is_radial())
    throw ContractError("geodesic_radius_invert requires a radial density");
  if (r_g <= 0.0) return 0.0;
  const double total = radial_total_length(F);
  if (r_g >= total)
    throw IncompleteMetricError(
        "INCOMPLETE_METRIC: geodesic radius exceeds the total ray length");
  double lo = 0.0, hi = 1.0;
  while (geodesic_distance_radial(F, hi) < r_g) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e13)
      throw IncompleteMetricError("INCOMPLETE_METRIC: bracket overflow");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (geodesic_distance_radial(F, mid) < r_g)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

// |Q^(2)|, |Q^(4)|, sigma_k along the ray of a radial metric, from the
// transfer functions alone.
struct RadialCurv {
  double q2 = 0.0;
  double q4 = 0.0;  // n >= 6
  double lam_rad = 0.0, lam_tan = 0.0;  // Ricci eigenvalues w.r.t. g
};

RadialCurv radial_curv(const PotentialField& F, double s) {
  const int n = F.dimension();
  RadialCurv rc;
  const RadialValues rv = F.radial_values(s);
  const double u = F.kappa() + rv.U;
  const double e2u = std::exp(2.0 * u);
  const double V2 = rv.V * rv.V;
  rc.q2 = -(n - 2) / 2.0 * (rv.L + 0.5 * (n - 2) * V2) / e2u;
  const double B = s > 0.0 ? rv.V / s : rv.L / n;
  const double A = rv.L - (n - 1) * B;
  if (n >= 6) {
    const double c = 0.5 * (n - 4);
    const double c2 = c * c, c3 = c2 * c, c4 = c2 * c2;
    const double frob = A * A + (n - 1) * B * B;
    const double bracket = c * rv.P + 2.0 * c2 * frob +
                           4.0 * c2 * rv.V * rv.M + 4.0 * c3 * V2 * A +
                           c2 * rv.L * rv.L + 2.0 * c3 * rv.L * V2 +
                           c4 * V2 * V2;
    rc.q4 = bracket / (e2u * e2u);
  }
  rc.lam_rad = (-(n - 2) * A - rv.L) / e2u;
  rc.lam_tan = (-(n - 2) * B - rv.L - (n - 2) * V2) / e2u;
  return rc;
}

double sigma_k_radial(const RadialCurv& rc, int n, int k) {
  // eigenvalues: lam_rad once, lam_tan with multiplicity n-1
  double choose_k = 1.0, choose_km1 = 1.0;
  for (int i = 0; i < k; ++i) choose_k = choose_k * (n - 1 - i) / (i + 1);
  for (int i = 0; i < k - 1; ++i)
    choose_km1 = choose_km1 * (n - 1 - i) / (i + 1);
  return choose_k * std::pow(rc.lam_tan, k) +
         choose_km1 * std::pow(rc.lam_tan, k - 1) * rc.lam_rad;
}

void check_growth_args(const PotentialField& F, int k, double p) {
  const int n = F.dimension();
  if (!F.density().is_radial())
    throw ContractError("growth integrals require a radial density");
  if (k < 1 || 2 * k > n - 2)
    throw ContractError("growth integrals require 1 <= k <= (n-2)/2");
  if (p < 1.0 || 2.0 * k * p >= n - 1)
    throw ContractError("growth integrals require 1 <= p < (n-1)/(2k)");
}

double growth_integral_euclidean(const PotentialField& F, int k, double p,
                                 double rho, bool sigma) {
  const int n = F.dimension();
  auto f = [&](double s) {
    const RadialCurv rc = radial_curv(F, s);
    double q;
    if (sigma)
      q = sigma_k_radial(rc, n, k);
    else
      q = std::pow(std::abs(k == 1 ? rc.q2 : rc.q4), p);
    return q * std::exp(n * F.u_radial(s)) * std::pow(s, n - 1);
  };
  return sphere_volume(n - 1) *
         integrate_adaptive(f, 0.0, rho, 1e-9, 1e-13, 2000).value;
}

}  // namespace

double curvature_growth_integral(const PotentialField& F, int k, double p,
                                 double r_g) {
  check_growth_args(F, k, p);
  const double rho = geodesic_radius_invert(F, r_g);
  return growth_integral_euclidean(F, k, p, rho, false);
}

double sigma_growth_integral(const PotentialField& F, int k, double r_g) {
  check_growth_args(F, k, 1.0);
  const double rho = geodesic_radius_invert(F, r_g);
  return growth_integral_euclidean(F, k, 1.0, rho, true);
}

// ---------------------------------------------------------------------------
// lattice shortest path

namespace {

struct Offsets {
  std::vector<std::array<int, 4>> steps;
  std::vector<double> lengths;
};

Offsets make_offsets() {
  Offsets o;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          if (a == 0 && b == 0 && c == 0 && d == 0) continue;
          o.steps.push_back({a, b, c, d});
          o.lengths.push_back(std::sqrt(double(a * a + b * b + c * c + d * d)));
        }
  return o;
}

// exact flat chamfer distance for the axis+diagonal move set
double flat_lattice_distance(const std::array<int, 4>& delta, double h) {
  std::array<double, 4> a;
  for (int i = 0; i < 4; ++i) a[i] = std::abs(delta[i]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  return h * ((a[0] - a[1]) + std::sqrt(2.0) * (a[1] - a[2]) +
              std::sqrt(3.0) * (a[2] - a[3]) + 2.0 * a[3]);
}

struct LatticeRun {
  double metric = 0.0;
  double flat = 0.0;
};

LatticeRun dijkstra_pair(const PotentialField& F, const GridConfig& grid,
                         const Vec& x, const Vec& y, int m) {
  const double hw = grid.half_width;
  const double h = 2.0 * hw / (m - 1);
  const std::size_t total = std::size_t(m) * m * m * m;
  if (total > grid.node_budget)
    throw ConfigError("grid node budget exceeded");

  auto snap = [&](const Vec& p, std::array<int, 4>& idx) {
    for (int i = 0; i < 4; ++i) {
      if (p[i] < -hw - 1e-12 || p[i] > hw + 1e-12)
        throw ConfigError("grid endpoint out of bounds");
      int j = int(std::lround((p[i] + hw) / h));
      idx[i] = std::clamp(j, 0, m - 1);
    }
  };
  std::array<int, 4> si, ti;
  snap(x, si);
  snap(y, ti);

  auto flat_id = [&](const std::array<int, 4>& q) {
    return ((std::size_t(q[0]) * m + q[1]) * m + q[2]) * m + q[3];
  };

  std::vector<float> w(total);  // e^u at nodes
  par::for_each_index(total, [&](std::size_t id) {
    std::array<int, 4> q;
    std::size_t rem = id;
    q[3] = int(rem % m);
    rem /= m;
    q[2] = int(rem % m);
    rem /= m;
    q[1] = int(rem % m);
    q[0] = int(rem / m);
    Vec p{};
    for (int i = 0; i < 4; ++i) p[i] = -hw + h * q[i];
    w[id] = float(std::exp(F.eval_u(p)));
  });

  static const Offsets offs = make_offsets();
  const std::size_t src = flat_id(si), dst = flat_id(ti);

  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  using QE = std::pair<double, std::size_t>;  // (dist, node), lexicographic
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    auto [d0, id] = pq.top();
    pq.pop();
    if (d0 > dist[id]) continue;
    if (id == dst) break;
    std::array<int, 4> q;
    std::size_t rem = id;
    q[3] = int(rem % m);
    rem /= m;
    q[2] = int(rem % m);
    rem /= m;
    q[1] = int(rem % m);
    q[0] = int(rem / m);
    for (std::size_t e = 0; e < offs.steps.size(); ++e) {
      std::array<int, 4> r;
      bool ok = true;
      for (int i = 0; i < 4; ++i) {
        r[i] = q[i] + offs.steps[e][i];
        if (r[i] < 0 || r[i] >= m) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const std::size_t rid = flat_id(r);
      const double edge =
          offs.lengths[e] * h * 0.5 * (double(w[id]) + double(w[rid]));
      const double nd = d0 + edge;
      if (nd < dist[rid]) {
        dist[rid] = nd;
        pq.push({nd, rid});
      }
    }
  }

  LatticeRun run;
  run.metric = dist[dst];
  std::array<int, 4> delta;
  for (int i = 0; i < 4; ++i) delta[i] = ti[i] - si[i];
  run.flat = flat_lattice_distance(delta, h);
  return run;
}

}  // namespace

GridDistance geodesic_distance_grid(const PotentialField& F, const Vec& x,
                                    const Vec& y, const GridConfig& grid,
                                    bool refine) {
  if (F.dimension() != 4)
    throw ContractError("grid geodesic distance is n = 4 only");
  if (grid.nodes_per_axis < 11 || grid.nodes_per_axis % 2 == 0)
    throw ConfigError("nodes_per_axis must be odd and at least 11");

  GridDistance gd;
  const LatticeRun full = dijkstra_pair(F, grid, x, y, grid.nodes_per_axis);
  gd.raw = full.metric;
  gd.flat = full.flat;
  Vec diff = x;
  for (int i = 0; i < 4; ++i) diff[i] -= y[i];
  const double euclid = norm(diff, 4);
  gd.calibrated = full.flat > 0.0 ? full.metric * euclid / full.flat : 0.0;
  if (refine) {
    const int mc = std::max(11, (grid.nodes_per_axis + 1) / 2 | 1);
    const LatticeRun coarse = dijkstra_pair(F, grid, x, y, mc);
    gd.error_estimate = std::abs(coarse.metric - full.metric);
  }
  return gd;
}

// ---------------------------------------------------------------------------
// radius sweeps

namespace {

std::vector<double> geometric_radii(const SweepConfig& sweep) {
  if (sweep.r_start < 1.0) throw ConfigError("sweep r_start must be >= 1");
  if (sweep.count < 8) throw ConfigError("sweep count must be at least 8");
  if (sweep.r_stop <= sweep.r_start)
    throw ConfigError("sweep must be strictly increasing");
  std::vector<double> r(sweep.count);
  const double g =
      std::pow(sweep.r_stop / sweep.r_start, 1.0 / (sweep.count - 1));
  for (int i = 0; i < sweep.count; ++i)
    r[i] = sweep.r_start * std::pow(g, i);
  r.back() = sweep.r_stop;
  return r;
}

int growth_kmax(int n) { return (n - 2) / 2; }

}  // namespace

std::vector<RadialSweepRow> run_sweep(const PotentialField& F,
                                      const SweepConfig& sweep,
                                      par::Exec mode) {
  const int n = F.dimension();
  const std::vector<double> radii = geometric_radii(sweep);
  const int count = static_cast<int>(radii.size());
  std::vector<RadialSweepRow> rows(count);
  const bool radial = F.density().is_radial();
  const int kmax = growth_kmax(n);

  if (radial) {
    // pointwise row data in parallel
    par::for_each_index(
        static_cast<std::size_t>(count),
        [&](std::size_t i) {
          const double r = radii[i];
          RadialSweepRow& row = rows[i];
          row.r = r;
          const RadialValues rv = F.radial_values(r);
          const double u = F.kappa() + rv.U;
          row.ubar = u;
          row.e_ku_avg[0] = std::exp(u);
          row.e_ku_avg[1] = std::exp(2.0 * u);
          row.r2_neglap = -r * r * rv.L;
          row.r2_gradsq = r * r * rv.V * rv.V;
          row.r2_R_e2u =
              -r * r * 2.0 * (n - 1) * (rv.L + 0.5 * (n - 2) * rv.V * rv.V);
          row.weighted_deriv = row.r2_gradsq;
          if (n >= 6) {
            row.r4_bilap = std::pow(r, 4) * rv.P;
            row.r4_lapsq = std::pow(r, 4) * rv.L * rv.L;
            const RadialCurv rc = radial_curv(F, r);
            row.r4_Q4e4u =
                std::pow(r, 4) * rc.q4 * std::exp(4.0 * u);
          }
          row.area_g =
              sphere_volume(n - 1) * std::pow(r, n - 1) *
              std::exp((n - 1) * u);
        },
        mode);

    // cumulative integrals: segments in parallel, prefix sums in order
    const int nseg = count;  // segment i covers (r_{i-1}, r_i], r_{-1} = 0
    const int nint = 2 + 2 * kmax;  // volume, length, growth Q2k & sigma
    std::vector<std::vector<double>> seg(nseg,
                                         std::vector<double>(nint, 0.0));
    par::for_each_index(
        static_cast<std::size_t>(nseg),
        [&](std::size_t i) {
          const double a = i == 0 ? 0.0 : radii[i - 1];
          const double b = radii[i];
          auto vol = [&](double s) {
            return std::exp(n * F.u_radial(s)) * std::pow(s, n - 1);
          };
          auto len = [&](double s) { return std::exp(F.u_radial(s)); };
          seg[i][0] = integrate_adaptive(vol, a, b, 1e-10, 1e-14, 2000).value;
          seg[i][1] = integrate_adaptive(len, a, b, 1e-10, 1e-14, 2000).value;
          for (int k = 1; k <= kmax; ++k) {
            auto gq = [&](double s) {
              const RadialCurv rc = radial_curv(F, s);
              return std::abs(k == 1 ? rc.q2 : rc.q4) *
                     std::exp(n * F.u_radial(s)) * std::pow(s, n - 1);
            };
            auto gs = [&](double s) {
              const RadialCurv rc = radial_curv(F, s);
              return sigma_k_radial(rc, n, k) *
                     std::exp(n * F.u_radial(s)) * std::pow(s, n - 1);
            };
            seg[i][2 * k] =
                integrate_adaptive(gq, a, b, 1e-9, 1e-13, 2000).value;
            seg[i][2 * k + 1] =
                integrate_adaptive(gs, a, b, 1e-9, 1e-13, 2000).value;
          }
        },
        mode);
    std::vector<double> acc(nint, 0.0);
    const double sn1 = sphere_volume(n - 1);
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < nint; ++j) acc[j] += seg[i][j];
      rows[i].vol_g = sn1 * acc[0];
      rows[i].dist_g = acc[1];
      rows[i].growth_Q2k.resize(kmax);
      rows[i].growth_sigma.resize(kmax);
      for (int k = 1; k <= kmax; ++k) {
        rows[i].growth_Q2k[k - 1] = sn1 * acc[2 * k];
        rows[i].growth_sigma[k - 1] = sn1 * acc[2 * k + 1];
      }
      rows[i].iso_ratio = std::pow(rows[i].area_g, double(n) / (n - 1)) /
                          (iso_norm_flat(n) * rows[i].vol_g);
      rows[i].iso_ratio_paper_cn =
          std::pow(rows[i].area_g, double(n) / (n - 1)) /
          (iso_norm_alt(n) * rows[i].vol_g);
    }
    return rows;
  }

  // non-radial rows: sphere averages, n = 4 only
  if (n != 4)
    throw ContractError("non-radial sweeps are supported for n = 4 only");
  par::for_each_index(
      static_cast<std::size_t>(count),
      [&](std::size_t i) {
        const double r = radii[i];
        RadialSweepRow& row = rows[i];
        row.r = r;
        double su = 0.0, se1 = 0.0, se2 = 0.0, slap = 0.0, sgrad = 0.0,
               sre2u = 0.0, sarea = 0.0, swd = 0.0;
        static thread_local SphereRule rule = hopf_sphere_rule(12, 12);
        for (std::size_t q = 0; q < rule.dirs.size(); ++q) {
          Vec x{};
          for (int k = 0; k < 4; ++k) x[k] = r * rule.dirs[q][k];
          const DerivativeStack st = F.eval_stack(x);
          const double w = rule.weights[q];
          const double g2 = st.grad_norm2();
          su += w * st.u;
          se1 += w * std::exp(st.u);
          se2 += w * std::exp(2.0 * st.u);
          slap += w * st.lap;
          sgrad += w * g2;
          sre2u += w * (-2.0 * (n - 1)) * (st.lap + 0.5 * (n - 2) * g2);
          sarea += w * std::exp((n - 1) * st.u);
          swd += w * std::exp((n - 2) * st.u) * g2;
        }
        row.ubar = su;
        row.e_ku_avg[0] = se1;
        row.e_ku_avg[1] = se2;
        row.r2_neglap = -r * r * slap;
        row.r2_gradsq = r * r * sgrad;
        row.r2_R_e2u = r * r * sre2u;
        row.area_g = sphere_volume(n - 1) * std::pow(r, n - 1) * sarea;
        row.weighted_deriv =
            r * r * swd / std::exp((n - 2) * su);
      },
      mode);

  // volume accumulated with fixed Gauss panels per segment
  std::vector<double> seg(count, 0.0);
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  FieldFn enu = [n](const PotentialField& FF, const Vec& x) {
    return std::exp(n * FF.eval_u(x));
  };
  par::for_each_index(
      static_cast<std::size_t>(count),
      [&](std::size_t i) {
        const double a = i == 0 ? 0.0 : radii[i - 1];
        const double b = radii[i];
        double s = 0.0;
        for (int q = 0; q < 16; ++q) {
          const double t = 0.5 * (b - a) * (gx[q] + 1.0) + a;
          s += gw[q] * sphere_avg_around(F, enu, Vec{}, t, 12, 12) *
               std::pow(t, n - 1);
        }
        seg[i] = 0.5 * (b - a) * s;
      },
      mode);
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    acc += seg[i];
    rows[i].vol_g = sphere_volume(n - 1) * acc;
    rows[i].iso_ratio = std::pow(rows[i].area_g, double(n) / (n - 1)) /
                        (iso_norm_flat(n) * rows[i].vol_g);
    rows[i].iso_ratio_paper_cn =
        std::pow(rows[i].area_g, double(n) / (n - 1)) /
        (iso_norm_alt(n) * rows[i].vol_g);
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const PotentialField& F,
                     const std::vector<RadialSweepRow>& rows) {
  const int n = F.dimension();
  const int kmax = growth_kmax(n);
  std::ofstream out(path);
  out << "r,ubar,r2_neglap,r2_gradsq,r2_R_e2u,r4_bilap,r4_lapsq,r4_Q4e4u,"
         "vol_g,area_g,iso_ratio,iso_ratio_paper_cn,dist_g";
  for (int k = 1; k <= kmax; ++k) out << ",growth_Q2k_" << k << "_1";
  for (int k = 1; k <= kmax; ++k) out << ",growth_sigma_" << k;
  out << "\n";

  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& row : rows) {
    out << num(row.r) << ',' << num(row.ubar) << ',' << num(row.r2_neglap)
        << ',' << num(row.r2_gradsq) << ',' << num(row.r2_R_e2u) << ',';
    out << (row.r4_bilap ? num(*row.r4_bilap) : "") << ','
        << (row.r4_lapsq ? num(*row.r4_lapsq) : "") << ','
        << (row.r4_Q4e4u ? num(*row.r4_Q4e4u) : "") << ',';
    out << num(row.vol_g) << ',' << num(row.area_g) << ','
        << num(row.iso_ratio) << ',' << num(row.iso_ratio_paper_cn) << ',';
    out << (row.dist_g ? num(*row.dist_g) : "");
    for (int k = 0; k < kmax; ++k)
      out << ','
          << (k < (int)row.growth_Q2k.size() ? num(row.growth_Q2k[k]) : "");
    for (int k = 0; k < kmax; ++k)
      out << ','
          << (k < (int)row.growth_sigma.size() ? num(row.growth_sigma[k])
                                               : "");
    out << "\n";
  }
}

}  // namespace qcurv
