// Benchmark comparing the serial reference path against the OpenMP path for
// the three hot kernels: transfer-table builds, pointwise stack scans, and
// Monte-Carlo double integrals. Also times the closed-form kernel means
// against the adaptive polar-angle quadrature route.

#include <chrono>
#include <cstdio>
#include <vector>

#include "qcurv/curvature.hpp"
#include "qcurv/geometry.hpp"

using namespace qcurv;
using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = Clock::now();
  f();
  return seconds(t0, Clock::now());
}

}  // namespace

int main() {
  std::vector<BumpSpec> bumps(1);
  bumps[0].profile = Profile::gaussian;
  const CurvatureDensity d = build_density(4, bumps);
  QuadConfig q;
  q.table_nodes = 600;
  q.table_rho_max = 1e4;

  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]",
              "speedup");

  PotentialField F;
  {
    const double ts = timed([&] {
      F = build_field(d, q, KernelRoute::quadrature, par::Exec::serial);
    });
    PotentialField Fp;
    const double tp = timed([&] {
      Fp = build_field(d, q, KernelRoute::quadrature, par::Exec::parallel);
    });
    std::printf("%-34s %10.3f %10.3f %8.2f\n", "build_field (quadrature)", ts,
                tp, ts / tp);
  }
  {
    PotentialField Fc;
    const double ts = timed([&] {
      Fc = build_field(d, q, KernelRoute::closed_means, par::Exec::serial);
    });
    PotentialField Fcp;
    const double tp = timed([&] {
      Fcp = build_field(d, q, KernelRoute::closed_means, par::Exec::parallel);
    });
    std::printf("%-34s %10.3f %10.3f %8.2f\n", "build_field (closed means)",
                ts, tp, ts / tp);
  }

  const std::size_t npts = 200000;
  std::vector<double> out(npts);
  auto scan = [&](par::Exec mode) {
    par::for_each_index(
        npts,
        [&](std::size_t i) {
          Rng rng = Rng::stream(7, i);
          Vec x = rng.unit_vector(4);
          const double r = 0.01 + 30.0 * rng.uniform();
          for (int k = 0; k < 4; ++k) x[k] *= r;
          const PointCurvature pc = point_curvature(F, x);
          out[i] = pc.ric_eigs[3];
        },
        mode);
  };
  {
    const double ts = timed([&] { scan(par::Exec::serial); });
    const double tp = timed([&] { scan(par::Exec::parallel); });
    std::printf("%-34s %10.3f %10.3f %8.2f\n", "point_curvature scan (200k)",
                ts, tp, ts / tp);
  }
  {
    Vec x{};
    x[0] = 1.5;
    McEstimate es, ep;
    const double ts = timed(
        [&] { es = b_doubleint(d, x, 2000000, 42, par::Exec::serial); });
    const double tp = timed(
        [&] { ep = b_doubleint(d, x, 2000000, 42, par::Exec::parallel); });
    std::printf("%-34s %10.3f %10.3f %8.2f\n", "b_doubleint (2M samples)", ts,
                tp, ts / tp);
    if (es.estimate != ep.estimate)
      std::printf("WARNING: serial/openmp Monte-Carlo results differ\n");
  }
  {
    SweepConfig sw;
    sw.r_stop = 1e3;
    sw.count = 24;
    std::vector<RadialSweepRow> rs, rp;
    const double ts = timed([&] { rs = run_sweep(F, sw, par::Exec::serial); });
    const double tp =
        timed([&] { rp = run_sweep(F, sw, par::Exec::parallel); });
    std::printf("%-34s %10.3f %10.3f %8.2f\n", "radial sweep (24 rows)", ts,
                tp, ts / tp);
    if (rs.back().vol_g != rp.back().vol_g)
      std::printf("WARNING: serial/openmp sweep results differ\n");
  }
  return 0;
}
