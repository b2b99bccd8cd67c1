#include <cmath>

#include "doctest.h"
#include "fields.hpp"
#include "oracles.hpp"
#include "qcurv/curvature.hpp"

using namespace qcurv;

TEST_CASE("eigenvalues and elementary symmetric polynomials") {
  // known symmetric 4x4: diag(1,2,3,4) conjugated by a rotation in (0,1)
  double a[kMaxDim * kMaxDim] = {};
  const double c = std::cos(0.3), s = std::sin(0.3);
  const double d0 = 1, d1 = 2;
  a[0 * kMaxDim + 0] = c * c * d0 + s * s * d1;
  a[1 * kMaxDim + 1] = s * s * d0 + c * c * d1;
  a[0 * kMaxDim + 1] = a[1 * kMaxDim + 0] = c * s * (d1 - d0);
  a[2 * kMaxDim + 2] = 3;
  a[3 * kMaxDim + 3] = 4;
  double eig[kMaxDim];
  symmetric_eigenvalues(a, 4, eig);
  CHECK(eig[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(eig[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eig[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eig[3] == doctest::Approx(1.0).epsilon(1e-12));

  const double vals[3] = {1, 2, 3};
  double e[kMaxDim + 1];
  elementary_symmetric(vals, 3, e);
  CHECK(e[0] == 1.0);
  CHECK(e[1] == doctest::Approx(6.0));
  CHECK(e[2] == doctest::Approx(11.0));
  CHECK(e[3] == doctest::Approx(6.0));
}

TEST_CASE("zero density curvature") {
  const PointCurvature pc = point_curvature(testfields::zero4(), Vec{});
  CHECK(pc.R == 0.0);
  CHECK(pc.Q2 == 0.0);
  CHECK(pc.Qtop == 0.0);
  for (int k = 1; k <= 4; ++k) CHECK(pc.sigma[k] == 0.0);
}

TEST_CASE("spheredensity: scaled round-sphere curvature") {
  const PotentialField& F = testfields::sphere4();
  Rng rng(5);
  for (int i = 0; i < 4; ++i) {
    Vec x = rng.unit_vector(4);
    for (int k = 0; k < 4; ++k) x[k] *= 2.0 * rng.uniform();
    const PointCurvature pc = point_curvature(F, x);
    CHECK(pc.R == doctest::Approx(48.0).epsilon(1e-9));
    CHECK(pc.Q2 == doctest::Approx(8.0).epsilon(1e-9));
    for (int k = 0; k < 4; ++k)
      CHECK(pc.ric_eigs[k] == doctest::Approx(12.0).epsilon(1e-9));
  }
  CHECK(point_curvature(F, Vec{}).Qtop ==
        doctest::Approx(96.0).epsilon(1e-12));
}

TEST_CASE("sigma_1 equals R and Qtop matches the density") {
  const PotentialField& F = testfields::twobump();
  Rng rng(17);
  for (int i = 0; i < 10; ++i) {
    Vec x = rng.unit_vector(4);
    for (int k = 0; k < 4; ++k) x[k] *= 3.0 * rng.uniform();
    const PointCurvature pc = point_curvature(F, x);
    CHECK(pc.sigma[1] ==
          doctest::Approx(pc.R).epsilon(1e-8).scale(std::abs(pc.R) + 1.0));
    CHECK(pc.Qtop * std::exp(4.0 * pc.stack.u) ==
          doctest::Approx(F.density().eval(x)).epsilon(1e-12));
  }
}

TEST_CASE("Ricci nonnegativity for the alpha = 1/2 gaussian") {
  const PotentialField& F = testfields::gauss4();
  Rng rng(23);
  double mineig = 1e300, maxeig = 0.0;
  for (int i = 0; i < 50; ++i) {
    Vec x = rng.unit_vector(4);
    const double r = std::exp(std::log(0.02) + rng.uniform() * std::log(500.0));
    for (int k = 0; k < 4; ++k) x[k] *= r;
    const PointCurvature pc = point_curvature(F, x);
    mineig = std::min(mineig, pc.ric_eigs[3]);
    maxeig = std::max(maxeig, std::abs(pc.ric_eigs[0]));
  }
  CHECK(mineig >= -1e-8 * maxeig);
}

TEST_CASE("sigma_k bounds when the Ricci eigenvalues are nonnegative") {
  const PotentialField& F = testfields::gauss4();
  Rng rng(29);
  for (int i = 0; i < 20; ++i) {
    Vec x = rng.unit_vector(4);
    for (int k = 0; k < 4; ++k) x[k] *= 5.0 * rng.uniform();
    const PointCurvature pc = point_curvature(F, x);
    if (pc.ric_eigs[3] < 0.0) continue;
    const double top = pc.ric_eigs[0];
    double binom = 1.0;
    for (int k = 1; k <= 4; ++k) {
      binom = binom * (4 - k + 1) / k;  // C(n, k)
      CHECK(pc.sigma[k] >= -1e-12 * std::pow(top + 1e-300, k));
      CHECK(pc.sigma[k] <= binom * std::pow(top, k) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("b identity: frozen value, nonnegativity, Monte-Carlo consistency") {
  const PotentialField& F = testfields::gauss4();
  Vec e1{};
  e1[0] = 1.0;
  CHECK(b_identity(F, e1) ==
        doctest::Approx(oracles::kGauss4B1).epsilon(1e-7));

  Rng rng(41);
  for (int i = 0; i < 10; ++i) {
    Vec x = rng.unit_vector(4);
    for (int k = 0; k < 4; ++k) x[k] *= 4.0 * rng.uniform();
    CHECK(b_identity(F, x) >= -1e-10);
  }

  // Monte-Carlo double integral within 3 sigma
  const CurvatureDensity& d = F.density();
  for (double r : {1.0, 2.5}) {
    Vec x{};
    x[0] = r;
    const McEstimate mc = b_doubleint(d, x, 400000, 777);
    const double ident = b_identity(F, x);
    CHECK(std::abs(mc.estimate - ident) <= 3.0 * mc.stderr_ + 1e-9);
  }
  // spheredensity at the origin
  const McEstimate mcs =
      b_doubleint(testfields::sphere4().density(), Vec{}, 400000, 778);
  CHECK(std::abs(mcs.estimate - b_identity(testfields::sphere4(), Vec{})) <=
        3.0 * mcs.stderr_ + 1e-9);

  // far outside the support the two routes agree on a tiny value
  Vec far{};
  far[0] = 100.0;
  const McEstimate mcf = b_doubleint(d, far, 400000, 779);
  const double bf = b_identity(F, far);
  CHECK(bf < 1e-6);
  CHECK(std::abs(mcf.estimate - bf) <= 3.0 * mcf.stderr_ + 1e-11);
}

TEST_CASE("b_doubleint contracts") {
  CHECK(b_doubleint(build_density(4, {}), Vec{}, 100, 1).estimate == 0.0);
  BumpSpec g, neg;
  g.profile = Profile::gaussian;
  neg = g;
  neg.weight = -0.5;
  CHECK_THROWS_AS(b_doubleint(build_density(4, {g, neg}), Vec{}, 100, 1),
                  ContractError);
}

TEST_CASE("h identity: dimension gate, nonnegativity, Monte-Carlo") {
  CHECK_THROWS_AS(h_identity(testfields::gauss4(), Vec{}), ContractError);
  const PotentialField& F = testfields::gauss6();
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    Vec x = rng.unit_vector(6);
    for (int k = 0; k < 6; ++k) x[k] *= 4.0 * rng.uniform();
    CHECK(h_identity(F, x) >= -1e-10);
  }
  for (double r : {1.0, 3.0}) {
    Vec x{};
    x[0] = r;
    const McEstimate mc = h_doubleint(F.density(), x, 400000, 901);
    const double ident = h_identity(F, x);
    CHECK(std::abs(mc.estimate - ident) <= 3.0 * mc.stderr_ + 1e-9);
  }
}

TEST_CASE("structure inequalities hold at sampled points (n = 6)") {
  const PotentialField& F = testfields::gauss6();
  Rng rng(47);
  for (int i = 0; i < 20; ++i) {
    Vec x = rng.unit_vector(6);
    const double r = 5.0 * std::pow(rng.uniform_pos(), 1.0 / 6.0);
    for (int k = 0; k < 6; ++k) x[k] *= r;
    const StructureInequalities s = structure_inequalities(F, x);
    const double scale = std::max({1.0e-300, std::abs(s.lhs1),
                                   std::abs(s.rhs1), std::abs(s.lhs2),
                                   std::abs(s.rhs2)});
    CHECK(s.lhs1 <= s.rhs1 + 1e-8 * scale);
    CHECK(s.lhs2 >= s.rhs2 - 1e-8 * scale);
  }
  CHECK_THROWS_AS(structure_inequalities(testfields::gauss4(), Vec{}),
                  ContractError);
}

TEST_CASE("structure inequalities in the exploratory n = 8 dimension") {
  BumpSpec b;
  b.profile = Profile::gaussian;
  const double a = 0.5;
  QuadConfig q = testfields::fast_quad(100.0, 300);
  const PotentialField F = build_field(build_density(8, {b}, &a), q);
  Rng rng(53);
  for (int i = 0; i < 8; ++i) {
    Vec x = rng.unit_vector(8);
    for (int k = 0; k < 8; ++k) x[k] *= 2.0 * rng.uniform();
    const StructureInequalities s = structure_inequalities(F, x);
    const double scale = std::max({1.0e-300, std::abs(s.lhs1),
                                   std::abs(s.rhs1), std::abs(s.lhs2),
                                   std::abs(s.rhs2)});
    CHECK(s.lhs1 <= s.rhs1 + 1e-8 * scale);
    CHECK(s.lhs2 >= s.rhs2 - 1e-8 * scale);
  }
}

TEST_CASE("Q4 expansion against the finite-difference biharmonic oracle") {
  const PotentialField& F = testfields::gauss6();
  const double c = 1.0;  // (n-4)/2 at n = 6
  Rng rng(59);
  auto ecu = [&](const Vec& y) { return std::exp(c * F.eval_u(y)); };
  for (int i = 0; i < 10; ++i) {
    Vec x = rng.unit_vector(6);
    for (int k = 0; k < 6; ++k) x[k] *= 1.5 * rng.uniform();
    const PointCurvature pc = point_curvature(F, x);
    REQUIRE(pc.Q4.has_value());
    const double lhs = *pc.Q4 * std::exp(5.0 * pc.stack.u);
    // nested centered Laplacians of e^{cu}
    const double h = 0.02;
    auto lap_of = [&](const Vec& y) {
      double s = -12.0 * ecu(y);
      for (int k = 0; k < 6; ++k) {
        Vec p = y, m = y;
        p[k] += h;
        m[k] -= h;
        s += ecu(p) + ecu(m);
      }
      return s / (h * h);
    };
    double bih = -12.0 * lap_of(x);
    for (int k = 0; k < 6; ++k) {
      Vec p = x, m = x;
      p[k] += h;
      m[k] -= h;
      bih += lap_of(p) + lap_of(m);
    }
    bih /= h * h;
    CHECK(lhs == doctest::Approx(bih).epsilon(1e-3).scale(std::abs(lhs) + 0.1));
  }
}

TEST_CASE("Q4 lower-bound inequality at sampled points (n = 6)") {
  const PotentialField& F = testfields::gauss6();
  const int n = 6;
  const double alpha = F.alpha();
  Rng rng(61);
  for (int i = 0; i < 20; ++i) {
    Vec x = rng.unit_vector(6);
    for (int k = 0; k < 6; ++k) x[k] *= 4.0 * rng.uniform();
    const PointCurvature pc = point_curvature(F, x);
    const DerivativeStack& st = pc.stack;
    const double lhs = 4.0 / ((n - 4) * (n - 4)) * *pc.Q4 *
                       std::exp(4.0 * st.u);
    const double rhs =
        (2.0 - alpha) * (2.0 * (n - 2) / (n - 4) - alpha) *
        ((n - 4) * (n - 4) / (4.0 * (n - 2) * (n - 2)) * st.lap * st.lap +
         st.bilap / (2.0 * (n - 2)));
    CHECK(lhs >= rhs - 1e-8 * (std::abs(lhs) + std::abs(rhs) + 1e-300));
  }
}
