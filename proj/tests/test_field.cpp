#include <gtest/gtest.h>

#include <random>

#include "umbilic/families.hpp"
#include "umbilic/field.hpp"

using namespace umbilic;

namespace {

void expect_jet_near(const Jet2& a, const Jet2& b, double tol1, double tol2) {
  EXPECT_NEAR(a.f, b.f, tol1);
  EXPECT_NEAR(a.f1, b.f1, tol1);
  EXPECT_NEAR(a.f2, b.f2, tol1);
  EXPECT_NEAR(a.f11, b.f11, tol2);
  EXPECT_NEAR(a.f12, b.f12, tol2);
  EXPECT_NEAR(a.f22, b.f22, tol2);
}

}  // namespace

TEST(Jet, ProductAndComposeMatchFiniteDifferences) {
  const Point2 p{0.4, -0.7};
  auto value = [](Point2 q) { return std::sin(q.x * q.y) * (q.x + 2.0 * q.y); };
  const Jet2 xy = x_jet(p) * y_jet(p);
  const Jet2 s = compose(xy, std::sin(xy.f), std::cos(xy.f), -std::sin(xy.f));
  const Jet2 lin = x_jet(p) + 2.0 * y_jet(p);
  expect_jet_near(s * lin, fd_jet(value, p), 1e-8, 1e-5);
}

TEST(Jet, RotateFrameMatchesDirectionalDerivatives) {
  const ScalarField f = make_field("asym_bump", {});
  const Jet2 j = f.jet({0.3, 0.2});
  for (double th : {0.0, 0.4, 1.3, 2.9}) {
    const Jet2 r = rotate_frame(j, th);
    const auto d = directional(j, Direction(th));
    const auto e = directional(j, Direction(th).perp());
    EXPECT_NEAR(r.f1, d.fX, 1e-15);
    EXPECT_NEAR(r.f11, d.fXX, 1e-15);
    EXPECT_NEAR(r.f2, e.fX, 1e-15);
    EXPECT_NEAR(r.f22, e.fXX, 1e-15);
    EXPECT_NEAR(r.f12, mixed(j, Direction(th), Direction(th).perp()), 1e-15);
  }
}

TEST(Field, DomainErrorOutsideDisk) {
  const ScalarField cap = make_field("sphere_cap", {});
  EXPECT_NO_THROW(cap.jet({0.5, 0.5}));
  EXPECT_THROW(cap.jet({1.0, 0.0}), DomainError);
}

TEST(Field, TabulatedReproducesQuadraticDerivatives) {
  auto q = [](Point2 p) { return 1.0 + 0.5 * p.x - p.y + p.x * p.x + 0.3 * p.x * p.y - 2.0 * p.y * p.y; };
  const int n = 21;
  std::vector<double> v(n * n);
  const std::array<double, 4> box{-1, -1, 1, 1};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[j * n + i] = q({-1.0 + 0.1 * i, -1.0 + 0.1 * j});
  const ScalarField t = make_tabulated("quad", box, n, n, v);
  // Second-order stencils are exact on quadratics, so node jets are exact and
  // derivatives blend linearly between nodes.
  for (Point2 p : {Point2{0.0, 0.0}, Point2{0.3, -0.7}, Point2{-1.0, 1.0}, Point2{0.55, 0.25}}) {
    const Jet2 j = t.jet(p);
    EXPECT_NEAR(j.f1, 0.5 + 2.0 * p.x + 0.3 * p.y, 1e-12);
    EXPECT_NEAR(j.f2, -1.0 + 0.3 * p.x - 4.0 * p.y, 1e-12);
    EXPECT_NEAR(j.f11, 2.0, 1e-10);
    EXPECT_NEAR(j.f12, 0.3, 1e-10);
    EXPECT_NEAR(j.f22, -4.0, 1e-10);
  }
  EXPECT_NEAR(t.value({0.3, -0.7}), q({0.3, -0.7}), 1e-12);
  EXPECT_THROW(t.jet({1.01, 0.0}), DomainError);
}

TEST(Field, TabulatedRejectsBadShapes) {
  EXPECT_THROW(make_tabulated("x", {0, 0, 1, 1}, 2, 5, std::vector<double>(10)), std::invalid_argument);
  EXPECT_THROW(make_tabulated("x", {0, 0, 1, 1}, 3, 3, std::vector<double>(8)), std::invalid_argument);
}

TEST(Field, FiniteDifferenceJetAgreesWithAnalytic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (const char* name : {"gaussian_bump", "inverse_quadratic", "bates_like", "cone_type", "asym_bump"}) {
    const ScalarField f = make_field(name, {});
    for (int i = 0; i < 20; ++i) {
      const Point2 p{U(rng), U(rng)};
      expect_jet_near(f.jet(p), fd_jet(f, p), 1e-8, 2e-5);
    }
  }
}

TEST(Decay, ProfileOfGaussianUsesMetadataConstant) {
  const ScalarField f = make_field("gaussian_bump", {});
  const std::vector<double> radii{2.0, 5.0, 10.0};
  const DecayProfile d = decay_profile(f, radii);
  EXPECT_FALSE(d.c_estimated);
  EXPECT_EQ(d.c, 0.0);
  ASSERT_EQ(d.rows.size(), 3u);
  EXPECT_NEAR(d.rows[0].sup_deviation, std::exp(-4.0), 1e-15);
  EXPECT_NEAR(d.rows[0].sup_r_grad, 2.0 * 2.0 * 2.0 * std::exp(-4.0), 1e-14);
  EXPECT_LT(d.rows[2].sup_r_grad, 0.05);
}

TEST(Decay, EstimatesConstantWhenMissing) {
  const ScalarField f = make_field("ridge", {{"lambda", 0.1}});
  const std::vector<double> radii{1.0, 2.0};
  const DecayProfile d = decay_profile(f, radii, 64);
  EXPECT_TRUE(d.c_estimated);
  EXPECT_GT(d.c_variance, 0.0);
}

TEST(Decay, RejectsUnorderedRadii) {
  const ScalarField f = make_field("gaussian_bump", {});
  const std::vector<double> radii{2.0, 1.0};
  EXPECT_THROW(decay_profile(f, radii), std::invalid_argument);
}
