#include <cmath>

#include "doctest.h"
#include "qcurv/density.hpp"
#include "qcurv/quadrature.hpp"

using namespace qcurv;

namespace {

double numeric_mass(const CurvatureDensity& d, double R) {
  // radial densities only; |S^{n-1}| int phi t^{n-1}
  const int n = d.dimension();
  auto f = [&](double t) {
    Vec x{};
    x[0] = t;
    return d.eval(x) * std::pow(t, n - 1);
  };
  return sphere_volume(n - 1) *
         integrate_adaptive(f, 0.0, R, 1e-11, 1e-14, 4000).value;
}

}  // namespace

TEST_CASE("empty density") {
  const CurvatureDensity d = build_density(4, {});
  CHECK(d.mass() == 0.0);
  CHECK(d.alpha() == 0.0);
  CHECK(d.support_radius(1e-10) == 0.0);
  CHECK(d.eval(Vec{}) == 0.0);
}

TEST_CASE("gaussian mass and peak") {
  BumpSpec b;
  b.profile = Profile::gaussian;
  b.scale = 1.7;
  b.weight = 2.5;
  const CurvatureDensity d = build_density(4, {b});
  const double s2 = 1.7 * 1.7;
  CHECK(d.mass() ==
        doctest::Approx(2.5 * std::pow(2 * kPi * s2, 2)).epsilon(1e-14));
  CHECK(d.eval(Vec{}) == doctest::Approx(2.5).epsilon(1e-15));
  // unit gaussian in n = 4 has alpha = 1/2 exactly
  BumpSpec u;
  u.profile = Profile::gaussian;
  CHECK(build_density(4, {u}).alpha() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("spheredensity constants") {
  BumpSpec b;
  b.profile = Profile::spheredensity;
  const CurvatureDensity d = build_density(4, {b});
  CHECK(d.mass() == doctest::Approx(16.0 * kPi * kPi).epsilon(1e-13));
  CHECK(d.alpha() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(d.eval(Vec{}) == doctest::Approx(96.0).epsilon(1e-14));
  // quadrature cross-check of the Chern-Gauss-Bonnet mass
  CHECK(numeric_mass(d, d.support_radius(1e-10)) ==
        doctest::Approx(d.mass()).epsilon(1e-8));

  const CurvatureDensity d6 = build_density(6, {b});
  CHECK(d6.alpha() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("polybump mass, support, quadrature cross-check") {
  BumpSpec b;
  b.profile = Profile::polybump;
  b.scale = 2.0;
  b.weight = 1.3;
  const CurvatureDensity d = build_density(4, {b});
  CHECK(d.mass() ==
        doctest::Approx(1.3 * 16.0 * kPi * kPi / 30.0).epsilon(1e-13));
  CHECK(d.support_radius(1e-3) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.support_radius(1e-12) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(numeric_mass(d, 2.0) == doctest::Approx(d.mass()).epsilon(1e-9));
}

TEST_CASE("mass quadrature matches analytic for every profile family") {
  for (int n : {4, 6}) {
    BumpSpec g;
    g.profile = Profile::gaussian;
    g.scale = 0.8;
    g.weight = 1.4;
    const CurvatureDensity d = build_density(n, {g});
    const double R = d.support_radius(1e-12);
    CHECK(numeric_mass(d, R) == doctest::Approx(d.mass()).epsilon(1e-8));
  }
}

TEST_CASE("randomized radial mixtures: mass quadrature vs analytic") {
  Rng rng(808);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<BumpSpec> bumps;
    const int nb = 1 + int(rng.uniform() * 3);
    for (int i = 0; i < nb; ++i) {
      BumpSpec b;
      b.profile = rng.uniform() < 0.5 ? Profile::gaussian : Profile::polybump;
      b.scale = 0.3 + 2.0 * rng.uniform();
      b.weight = (rng.uniform() < 0.25 ? -1.0 : 1.0) * (0.2 + rng.uniform());
      bumps.push_back(b);
    }
    const CurvatureDensity d = build_density(4, bumps);
    const double R = d.support_radius(1e-10);
    CHECK(numeric_mass(d, R) ==
          doctest::Approx(d.mass()).epsilon(1e-8).scale(d.abs_mass()));
  }
}

TEST_CASE("alpha linearity and alpha_target rescale") {
  BumpSpec a, b;
  a.profile = Profile::gaussian;
  a.scale = 1.0;
  a.weight = 0.9;
  b.profile = Profile::polybump;
  b.scale = 1.5;
  b.weight = -0.4;
  const CurvatureDensity d1 = build_density(4, {a, b});
  BumpSpec a3 = a, b3 = b;
  a3.weight *= 3.0;
  b3.weight *= 3.0;
  const CurvatureDensity d3 = build_density(4, {a3, b3});
  CHECK(d3.alpha() == doctest::Approx(3.0 * d1.alpha()).epsilon(1e-15));

  const double target = 0.73;
  const CurvatureDensity dr = build_density(4, {a, b}, &target);
  CHECK(std::abs(dr.alpha() - target) <= 1e-12);
}

TEST_CASE("gaussian tail radius inverts the incomplete gamma") {
  BumpSpec g;
  g.profile = Profile::gaussian;
  g.scale = 1.0;
  const double R = CurvatureDensity::profile_tail_radius(g, 4, 1e-12);
  CHECK(gamma_q(2.0, 0.5 * R * R) == doctest::Approx(1e-12).epsilon(1e-3));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(build_density(5, {}), ConfigError);
  CHECK_THROWS_AS(build_density(2, {}), ConfigError);
  BumpSpec bad;
  bad.scale = 0.0;
  CHECK_THROWS_AS(build_density(4, {bad}), ConfigError);
  BumpSpec off;
  off.profile = Profile::spheredensity;
  off.center[0] = 1.0;
  CHECK_THROWS_AS(build_density(4, {off}), ConfigError);
  BumpSpec w;
  w.profile = Profile::spheredensity;
  w.weight = 2.0;
  CHECK_THROWS_AS(build_density(4, {w}), ConfigError);
  const double t = 0.5;
  CHECK_THROWS_AS(build_density(4, {}, &t), ConfigError);
}

TEST_CASE("samplers reproduce profile moments") {
  // gaussian n = 4: E|y|^2 = 4 s^2
  BumpSpec g;
  g.profile = Profile::gaussian;
  g.scale = 0.7;
  const CurvatureDensity dg = build_density(4, {g});
  Rng rng(12345);
  const std::size_t N = 200000;
  double m2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const Vec y = dg.sample(rng);
    m2 += norm2(y, 4);
  }
  m2 /= N;
  CHECK(m2 == doctest::Approx(4 * 0.49).epsilon(0.02));

  // polybump: all samples inside the support
  BumpSpec p;
  p.profile = Profile::polybump;
  p.scale = 1.2;
  const CurvatureDensity dp = build_density(4, {p});
  for (int i = 0; i < 2000; ++i)
    CHECK(norm(dp.sample(rng), 4) <= 1.2 + 1e-12);

  // spheredensity: radial CDF at t = 1 is exactly 1/2 (I_{1/2}(k,k))
  BumpSpec s;
  s.profile = Profile::spheredensity;
  const CurvatureDensity ds = build_density(4, {s});
  int inside = 0;
  const int M = 100000;
  for (int i = 0; i < M; ++i)
    if (norm(ds.sample(rng), 4) <= 1.0) ++inside;
  CHECK(double(inside) / M == doctest::Approx(0.5).epsilon(0.02));

  // signed density refuses to sample
  BumpSpec neg = g;
  neg.weight = -1.0;
  const CurvatureDensity dneg = build_density(4, {g, neg});
  CHECK_THROWS_AS(dneg.sample(rng), ContractError);
}
