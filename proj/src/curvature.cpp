#include "qcurv/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace qcurv {

void symmetric_eigenvalues(const double* a, int n, double* eigs) {
  // cyclic Jacobi; n <= 8 so a fixed sweep budget is plenty
  double m[kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = a[i * kMaxDim + j];

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
    if (off < 1e-30) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m[p][q]) < 1e-300) continue;
        const double theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) eigs[i] = m[i][i];
  std::sort(eigs, eigs + n, std::greater<double>());
}

void elementary_symmetric(const double* vals, int n, double* e) {
  // Newton's identities from power sums
  double p[kMaxDim + 1] = {0.0};
  for (int i = 1; i <= n; ++i)
    for (int j = 0; j < n; ++j) p[i] += std::pow(vals[j], i);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    double sign = 1.0;
    for (int i = 1; i <= k; ++i) {
      s += sign * e[k - i] * p[i];
      sign = -sign;
    }
    e[k] = s / k;
  }
}

double b_identity(const PotentialField& F, const Vec& x) {
  const int n = F.dimension();
  const DerivativeStack st = F.eval_stack(x);
  return (-F.alpha() / (n - 2)) * st.lap - st.grad_norm2();
}

double h_identity(const PotentialField& F, const Vec& x) {
  const int n = F.dimension();
  if (n < 6) throw ContractError("h is defined for n >= 6 only");
  const DerivativeStack st = F.eval_stack(x);
  const double gdl = dot(st.grad, st.grad_lap, n);
  return (gdl + F.alpha() / (2.0 * (n - 4)) * st.bilap +
          st.lap * st.lap / (n - 2)) /
         (n - 2);
}

PointCurvature point_curvature(const PotentialField& F, const Vec& x) {
  const int n = F.dimension();
  PointCurvature pc;
  pc.stack = F.eval_stack(x);
  const DerivativeStack& st = pc.stack;
  const double g2 = st.grad_norm2();
  const double e2u = std::exp(2.0 * st.u);

  pc.R = -2.0 * (n - 1) * (st.lap + 0.5 * (n - 2) * g2) / e2u;
  pc.Q2 = (n - 2) / (4.0 * (n - 1)) * pc.R;
  pc.Qtop = F.density().eval(x) * std::exp(-double(n) * st.u);

  if (n >= 6) {
    const double c = 0.5 * (n - 4);
    const double c2 = c * c, c3 = c2 * c, c4 = c2 * c2;
    const double bracket =
        c * st.bilap + 2.0 * c2 * st.hess_frobenius2() +
        4.0 * c2 * dot(st.grad, st.grad_lap, n) +
        4.0 * c3 * st.grad_hess_grad() + c2 * st.lap * st.lap +
        2.0 * c3 * st.lap * g2 + c4 * g2 * g2;
    pc.Q4 = bracket * std::exp(-4.0 * st.u);
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = -(n - 2) * st.hess_at(i, j) +
                 (n - 2) * st.grad[i] * st.grad[j];
      if (i == j) v += -st.lap - (n - 2) * g2;
      pc.ric[i * kMaxDim + j] = v;
    }

  std::array<double, kMaxDim * kMaxDim> ric_g{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ric_g[i * kMaxDim + j] = pc.ric[i * kMaxDim + j] / e2u;
  symmetric_eigenvalues(ric_g.data(), n, pc.ric_eigs.data());
  elementary_symmetric(pc.ric_eigs.data(), n, pc.sigma.data());

  pc.b = (-F.alpha() / (n - 2)) * st.lap - g2;
  if (n >= 6) pc.h = h_identity(F, x);
  return pc;
}

namespace {

struct MeanVar {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Deterministic blocked accumulation of (term_i, term_i^2).
template <class TermFn>
MeanVar blocked_mean(std::size_t nsamples, TermFn&& term, par::Exec mode) {
  const std::size_t nblocks =
      (nsamples + par::kReduceBlock - 1) / par::kReduceBlock;
  std::vector<double> s1(nblocks, 0.0), s2(nblocks, 0.0);
  par::for_each_index(
      nblocks,
      [&](std::size_t blk) {
        const std::size_t lo = blk * par::kReduceBlock;
        const std::size_t hi =
            std::min(nsamples, lo + par::kReduceBlock);
        double a = 0.0, b = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          const double t = term(i);
          a += t;
          b += t * t;
        }
        s1[blk] = a;
        s2[blk] = b;
      },
      mode);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    sum += s1[b];
    sumsq += s2[b];
  }
  MeanVar mv;
  mv.mean = sum / nsamples;
  const double var =
      std::max(0.0, sumsq / nsamples - mv.mean * mv.mean);
  mv.stderr_ = std::sqrt(var / nsamples);
  return mv;
}

}  // namespace

McEstimate b_doubleint(const CurvatureDensity& d, const Vec& x,
                       std::size_t samples, std::uint64_t seed,
                       par::Exec mode) {
  if (!d.is_nonnegative())
    throw ContractError("b_doubleint requires a nonnegative density");
  McEstimate est;
  est.samples = samples;
  if (d.is_zero() || samples == 0) return est;
  const int n = d.dimension();
  const double alpha = d.alpha();

  MeanVar mv = blocked_mean(
      samples,
      [&](std::size_t i) {
        Rng rng = Rng::stream(seed, i);
        const Vec y = d.sample(rng);
        const Vec z = d.sample(rng);
        Vec yz = y, xy = x, xz = x;
        for (int k = 0; k < n; ++k) {
          yz[k] -= z[k];
          xy[k] -= y[k];
          xz[k] -= z[k];
        }
        return norm2(yz, n) / (2.0 * norm2(xy, n) * norm2(xz, n));
      },
      mode);
  est.estimate = alpha * alpha * mv.mean;
  est.stderr_ = alpha * alpha * mv.stderr_;
  return est;
}

McEstimate h_doubleint(const CurvatureDensity& d, const Vec& x,
                       std::size_t samples, std::uint64_t seed,
                       par::Exec mode) {
  if (d.dimension() < 6)
    throw ContractError("h_doubleint requires n >= 6");
  if (!d.is_nonnegative())
    throw ContractError("h_doubleint requires a nonnegative density");
  McEstimate est;
  est.samples = samples;
  if (d.is_zero() || samples == 0) return est;
  const int n = d.dimension();
  const double alpha = d.alpha();
  const double mass = d.mass();

  // z-proposal: half mixture density, half |x-z|^{-4} ball around x (keeps
  // the estimator variance finite across the kernel singularity)
  const double R0 = d.support_radius(1e-9) + norm(x, n) + 1.0;
  const double sing_norm =
      (n - 4) / (sphere_volume(n - 1) * std::pow(R0, n - 4));

  MeanVar mv = blocked_mean(
      samples,
      [&](std::size_t i) {
        Rng rng = Rng::stream(seed ^ 0x5851F42D4C957F2DULL, i);
        const Vec y = d.sample(rng);
        Vec z;
        if (rng.uniform() < 0.5) {
          z = d.sample(rng);
        } else {
          const double t = R0 * std::pow(rng.uniform_pos(), 1.0 / (n - 4));
          const Vec dir = rng.unit_vector(n);
          z = x;
          for (int k = 0; k < n; ++k) z[k] += t * dir[k];
        }
        Vec yz = y, xy = x, xz = x;
        for (int k = 0; k < n; ++k) {
          yz[k] -= z[k];
          xy[k] -= y[k];
          xz[k] -= z[k];
        }
        const double xz2 = norm2(xz, n);
        const double p_z = d.eval(z) / mass;
        double q_z = 0.5 * p_z;
        if (xz2 < R0 * R0) q_z += 0.5 * sing_norm / (xz2 * xz2);
        if (q_z <= 0.0) return 0.0;
        const double integrand =
            norm2(yz, n) / (norm2(xy, n) * xz2 * xz2);
        return integrand * p_z / q_z;
      },
      mode);
  est.estimate = alpha * alpha * mv.mean;
  est.stderr_ = alpha * alpha * mv.stderr_;
  return est;
}

StructureInequalities structure_inequalities(const PotentialField& F,
                                             const Vec& x) {
  const int n = F.dimension();
  if (n < 6)
    throw ContractError("structure inequalities require n >= 6");
  StructureInequalities s;
  const DerivativeStack st = F.eval_stack(x);
  const double alpha = F.alpha();
  const double b = (-alpha / (n - 2)) * st.lap - st.grad_norm2();
  const double h = h_identity(F, x);
  const double gdl = dot(st.grad, st.grad_lap, n);

  s.lhs1 = (-alpha / (n - 2)) * gdl - 2.0 * st.grad_hess_grad();
  s.rhs1 = 2.0 / (n - 2) * (-st.lap) * b + h;
  s.lhs2 = alpha / (n - 2) * st.bilap +
           2.0 * (st.hess_frobenius2() + gdl);
  s.rhs2 = 2.0 * (n - 6) * h;
  return s;
}

}  // namespace qcurv
