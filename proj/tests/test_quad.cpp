#include <gtest/gtest.h>

#include <cstdlib>

#include "umbilic/families.hpp"
#include "umbilic/quad.hpp"

using namespace umbilic;

TEST(Gauss, ThreePointRule) {
  const GaussRule g = gauss_legendre(3);
  EXPECT_NEAR(g.nodes[0], -std::sqrt(0.6), 1e-15);
  EXPECT_NEAR(g.nodes[1], 0.0, 1e-15);
  EXPECT_NEAR(g.weights[0], 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(g.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(Gauss, ExactForDegreeTwoNMinusOne) {
  for (int n : {1, 2, 5, 16, 32}) {
    const GaussRule g = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " deg=" << deg;
    }
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(Disk, AreaAndMoments) {
  for (double r : {0.7, 1.0, 2.5, 8.0}) {
    EXPECT_NEAR(disk_integral([](Point2) { return 1.0; }, r), pi * r * r, 1e-12 * r * r);
    EXPECT_NEAR(disk_integral([](Point2 p) { return p.x * p.x; }, r), pi * std::pow(r, 4) / 4.0,
                1e-12 * std::pow(r, 4));
    EXPECT_NEAR(disk_integral([](Point2 p) { return std::exp(-dot(p, p)); }, r),
                pi * (1.0 - std::exp(-r * r)), 1e-13);
  }
}

TEST(Disk, SchemeValidation) {
  EXPECT_THROW((QuadScheme{3, 128}.validate()), std::invalid_argument);
  EXPECT_THROW((QuadScheme{16, 15}.validate()), std::invalid_argument);
  EXPECT_THROW((QuadScheme{16, 8}.validate()), std::invalid_argument);
  EXPECT_THROW(disk_nodes(0.0, {}), std::invalid_argument);
  const QuadScheme d = QuadScheme{}.doubled();
  EXPECT_EQ(d.n_r, 32);
  EXPECT_EQ(d.n_theta, 256);
}

TEST(Flux, LinearFieldMatchesClosedForm) {
  PlaneField V;
  V.eval = [](Point2 p) { return PlaneSample{{p.x, p.y}, 2.0}; };
  for (double r : {1.0, 3.0}) {
    EXPECT_NEAR(boundary_flux(V, r, 64), 2.0 * pi * r * r, 1e-12 * r * r);
    EXPECT_LT(divergence_consistency(V, r), 1e-11 * r * r);
    EXPECT_NEAR(flux_majorant(V, r, 64), 2.0 * pi * r * r, 1e-12 * r * r);
  }
}

TEST(Thm2, RadialFieldIntegralVanishes) {
  const std::vector<double> radii{2.0, 4.0, 6.0, 8.0};
  for (const char* name : {"gaussian_bump", "inverse_quadratic", "paraboloid"}) {
    const DecayTable t = verify_thm2(make_field(name), Direction(0.0), Direction(0.5 * pi), radii);
    // Roundoff grows with the disk area for unbounded integrands.
    for (const auto& row : t.rows) EXPECT_LT(std::abs(row.I_area), 1e-13 * row.r * row.r) << name << " r=" << row.r;
  }
}

TEST(Thm2, AsymBumpAreaMatchesFluxAndDecays) {
  const std::vector<double> radii{2.0, 4.0, 8.0};
  const DecayTable t =
      verify_thm2(make_field("asym_bump"), Direction(0.0), Direction(0.5 * pi), radii);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row.I_area, row.I_flux, 1e-12);
    EXPECT_LE(std::abs(row.I_flux), row.majorant * (1.0 + 1e-12));
  }
  // Reference from the boundary flux at r = 2 with the doubled scheme.
  const PlaneField V = thm2_vectorfield(make_field("asym_bump"), Direction(0.0), Direction(0.5 * pi));
  EXPECT_NEAR(t.rows[0].I_area, boundary_flux(V, 2.0, 1024), 1e-14);
  EXPECT_GT(std::abs(t.rows[0].I_area), 1e-6);
  EXPECT_LT(std::abs(t.rows[2].I_area), 1e-6);
}

TEST(Thm3, DivergenceFormMatchesFluxAndStatedIsReported) {
  const std::vector<double> radii{2.0, 4.0, 8.0};
  const DecayTable t = verify_thm3(make_field("asym_bump"), 0.0, radii);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row.I_area, row.I_flux, 1e-11);
    ASSERT_TRUE(row.I_stated.has_value());
  }
  EXPECT_LT(std::abs(t.rows[2].I_area), 1e-6);
}

TEST(Quad, RejectsBadRadii) {
  const ScalarField f = make_field("asym_bump");
  const std::vector<double> bad{2.0, 2.0};
  EXPECT_THROW(verify_thm2(f, Direction(0), Direction(1), bad), std::invalid_argument);
  EXPECT_THROW(verify_thm3(f, 0.0, std::vector<double>{}), std::invalid_argument);
}

TEST(Quad, ThreadCountDoesNotChangeBits) {
  const ScalarField f = make_field("asym_bump");
  const std::vector<double> radii{3.0};
  setenv("UMBILIC_THREADS", "1", 1);
  const double a = verify_thm3(f, 0.4, radii).rows[0].I_area;
  setenv("UMBILIC_THREADS", "4", 1);
  const double b = verify_thm3(f, 0.4, radii).rows[0].I_area;
  unsetenv("UMBILIC_THREADS");
  EXPECT_EQ(a, b);
}
