#include <gtest/gtest.h>

#include <random>

#include "umbilic/curvature.hpp"
#include "umbilic/families.hpp"
#include "umbilic/transform.hpp"

using namespace umbilic;

namespace {

// graph(f) as a parametric patch with the downward normal, so that its
// principal curvatures carry the same sign as f_XX.
PatchJet graph_patch(const Jet2& j, Point2 p) {
  return {{p.x, p.y, j.f}, {1, 0, j.f1}, {0, 1, j.f2}, {0, 0, j.f11}, {0, 0, j.f12}, {0, 0, j.f22}};
}

const std::vector<std::string>& sample_fields() {
  static const std::vector<std::string> names{"asym_bump", "bates_like", "cone_type", "ridge",
                                              "gaussian_bump", "saddle", "paraboloid", "separable"};
  return names;
}

}  // namespace

TEST(Curvature, ThetaFormMatchesDirectionForm) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-2.0, 2.0), T(0.0, two_pi);
  for (int i = 0; i < 500; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Jet2 j = f.jet({U(rng), U(rng)});
    const double th = T(rng);
    EXPECT_NEAR(normal_curvature(j, Direction(th)), normal_curvature_theta(j, th), 1e-13);
  }
}

TEST(Curvature, DkDthetaMatchesCentralDifference) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-2.0, 2.0), T(0.0, two_pi);
  const double h = 1e-5;
  for (int i = 0; i < 300; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Jet2 j = f.jet({U(rng), U(rng)});
    const double th = T(rng);
    const double fd =
        (normal_curvature_theta(j, th + h) - normal_curvature_theta(j, th - h)) / (2.0 * h);
    EXPECT_NEAR(dk_dtheta(j, th), fd, 1e-7);
  }
}

TEST(Curvature, PrincipalCurvaturesAreExtremesOfNormalCurvature) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int i = 0; i < 40; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Jet2 j = f.jet({U(rng), U(rng)});
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < 20000; ++k) {
      const double v = normal_curvature_theta(j, pi * k / 20000);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const PrincipalData pd = shape_operator(j);
    EXPECT_NEAR(pd.k1, lo, 1e-7);
    EXPECT_NEAR(pd.k2, hi, 1e-7);
  }
}

TEST(Curvature, ShapeOperatorAgreesWithPatchWeingarten) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Point2 p{U(rng), U(rng)};
    const Jet2 j = f.jet(p);
    const PrincipalData pd = shape_operator(j);
    const PatchPrincipal pp = patch_principal(graph_patch(j, p), -1);
    EXPECT_NEAR(pd.k1, pp.k1, 1e-12);
    EXPECT_NEAR(pd.k2, pp.k2, 1e-12);
    EXPECT_NEAR(pd.K, pp.k1 * pp.k2, 1e-12);
    if (!pd.directions_arbitrary && pp.k2 - pp.k1 > 1e-6) {
      // Projected principal directions match the patch's (u, v) coefficients.
      const Vec3 e1{pd.e1.x, pd.e1.y, 0.0};
      const Vec3 c1{pp.c1[0], pp.c1[1], 0.0};
      EXPECT_LT(line_angle(e1, c1), 1e-8);
    }
  }
}

TEST(Curvature, SphereCapIsTotallyUmbilic) {
  const ScalarField cap = make_field("sphere_cap", {{"R", 2.0}});
  for (Point2 p : {Point2{0, 0}, Point2{0.5, 1.0}, Point2{-1.2, 0.3}}) {
    const PrincipalData pd = shape_operator(cap, p);
    EXPECT_NEAR(pd.k1, 0.5, 1e-13);
    EXPECT_NEAR(pd.k2, 0.5, 1e-13);
    EXPECT_TRUE(pd.directions_arbitrary);
    EXPECT_TRUE(is_umbilic(cap.jet(p)));
  }
}

TEST(Curvature, ResidualClosedForms) {
  const ScalarField par = make_field("paraboloid");
  const ScalarField sad = make_field("saddle");
  for (Point2 p : {Point2{0.3, -0.2}, Point2{1.0, 2.0}, Point2{-1.5, 0.5}}) {
    const UmbilicResiduals r = umbilic_residuals(par, p);
    EXPECT_NEAR(r.P1, -8.0 * p.x * p.y, 1e-12);
    EXPECT_NEAR(r.P2, 8.0 * (p.x * p.x - p.y * p.y), 1e-12);
    const UmbilicResiduals s = umbilic_residuals(sad, p);
    EXPECT_NEAR(s.P1, 1.0 + p.y * p.y, 1e-12);
    EXPECT_NEAR(s.D, 4.0 * p.x * p.x * p.y * p.y + 4.0 * (1.0 + p.x * p.x + p.y * p.y), 1e-12);
  }
  EXPECT_EQ(umbilic_residuals(par, {0, 0}).D, 0.0);
  EXPECT_TRUE(is_umbilic(par.jet({0, 0})));
  EXPECT_FALSE(is_umbilic(par.jet({0.1, 0})));
}

TEST(Curvature, DiscriminantIdentities) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Jet2 j = f.jet({U(rng), U(rng)});
    const PrincipalData pd = shape_operator(j);
    const double w = 1.0 + j.grad_norm2();
    const double hk = 0.25 * (pd.k2 - pd.k1) * (pd.k2 - pd.k1);  // H^2 - K
    const double D = umbilic_residuals(j).D;
    const double scale = std::max(1e-300, std::abs(D));
    EXPECT_LE(std::abs(D - 4.0 * w * w * w * hk), 1e-10 * scale + 1e-14);
    EXPECT_LE(std::abs(coordinate_free_discriminant(j) - 4.0 * hk), 1e-10 * std::abs(4.0 * hk) + 1e-14);
    EXPECT_NEAR(normalized_discriminant(j), 4.0 * hk, 1e-10 * std::abs(4.0 * hk) + 1e-14);
  }
}

TEST(Curvature, UmbilicResidualsVanishWhereNormalCurvatureIsConstant) {
  // On a sphere cap every direction gives the same k, and P1 = P2 = 0.
  const ScalarField cap = make_field("sphere_cap");
  const UmbilicResiduals r = umbilic_residuals(cap, {0.3, 0.4});
  EXPECT_NEAR(r.P1, 0.0, 1e-13);
  EXPECT_NEAR(r.P2, 0.0, 1e-13);
  EXPECT_NEAR(r.D, 0.0, 1e-12);
}

TEST(VectorFields, Thm2StatedEqualsDivergence) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(-2.0, 2.0), T(0.0, two_pi);
  for (int i = 0; i < 300; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Direction X(T(rng)), Y(T(rng));
    const PlaneField V = thm2_vectorfield(f, X, Y);
    const Point2 p{U(rng), U(rng)};
    const double div = V.eval(p).div;
    EXPECT_NEAR(V.stated(p), div, 1e-12 * std::max(1.0, std::abs(div)));
  }
}

TEST(VectorFields, AnalyticDivergenceMatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0), T(0.0, two_pi);
  for (int i = 0; i < 100; ++i) {
    const ScalarField f = make_field(sample_fields()[i % sample_fields().size()]);
    const Point2 p{U(rng), U(rng)};
    const PlaneField V2 = thm2_vectorfield(f, Direction(T(rng)), Direction(T(rng)));
    const PlaneField V3 = thm3_vectorfield(f, T(rng));
    EXPECT_NEAR(fd_divergence(V2, p), V2.eval(p).div, 1e-6 * std::max(1.0, std::abs(V2.eval(p).div)));
    EXPECT_NEAR(fd_divergence(V3, p), V3.eval(p).div, 1e-6 * std::max(1.0, std::abs(V3.eval(p).div)));
  }
}

TEST(VectorFields, Thm3StatedIsTwiceSqrtWeightTimesDivergence) {
  const ScalarField f = make_field("asym_bump");
  for (double th : {0.0, 0.7, 2.0})
    for (Point2 p : {Point2{0.2, 0.9}, Point2{-1.0, 0.4}}) {
      const PlaneField V = thm3_vectorfield(f, th);
      const Jet2 r = rotate_frame(f.jet(p), th);
      EXPECT_NEAR(V.stated(p), 2.0 * std::sqrt(1.0 + r.f1 * r.f1) * V.eval(p).div, 1e-14);
    }
}

TEST(VectorFields, Thm2ZeroForEqualDirections) {
  const ScalarField f = make_field("bates_like");
  const PlaneField V = thm2_vectorfield(f, Direction(0.3), Direction(0.3));
  EXPECT_EQ(V.eval({0.5, 0.5}).div, 0.0);
}
