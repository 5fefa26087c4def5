#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "umbilic/curvature.hpp"
#include "umbilic/families.hpp"

using namespace umbilic;

TEST(Registry, ContainsNamedFamilies) {
  const auto& all = list_families();
  EXPECT_GE(all.size(), 12u);
  for (const char* name : {"saddle", "cylinder", "paraboloid", "sphere_cap", "gaussian_bump",
                           "inverse_quadratic", "loglog_tail", "bates_like", "ridge", "cone_type",
                           "separable", "asym_bump"})
    EXPECT_NO_THROW(find_family(name)) << name;
  EXPECT_FALSE(find_family("asym_bump").reference_family);
  EXPECT_EQ(find_family("ridge").umbilic_free, Expectation::yes);
  EXPECT_EQ(find_family("cone_type").positively_curved, Expectation::yes);
}

TEST(Registry, EveryFamilyEvaluatesAtDefaults) {
  for (const auto& spec : list_families()) {
    const ScalarField f = make_field(spec.name);
    EXPECT_TRUE(f.jet({0.1, -0.2}).finite()) << spec.name;
    if (spec.name != "sphere_cap") {
      EXPECT_TRUE(f.jet({3.5, 1.0}).finite()) << spec.name;
    }
  }
}

TEST(Registry, Errors) {
  EXPECT_THROW(make_field("nope"), std::invalid_argument);
  EXPECT_THROW(make_field("ridge", {{"lambda", 0.0}}), std::invalid_argument);
  EXPECT_THROW(make_field("ridge", {{"lambda", -0.1}}), std::invalid_argument);
  EXPECT_THROW(make_field("ridge", {{"mu", 1.0}}), std::invalid_argument);
  EXPECT_THROW(make_field("separable", {{"g", 7.0}}), std::invalid_argument);
  EXPECT_THROW(parse_field_spec("ridge:lambda"), std::invalid_argument);
  EXPECT_THROW(parse_field_spec("ridge:lambda=abc"), std::invalid_argument);
}

TEST(Registry, ParseFieldSpec) {
  const ScalarField a = parse_field_spec("bates_like:λ=0.2");
  EXPECT_DOUBLE_EQ(a.info().params.at("lambda"), 0.2);
  const ScalarField b = parse_field_spec("separable:g=exp,h=softplus,lambda=0.3");
  const ScalarField c = make_field("separable", {{"g", 1.0}, {"h", 2.0}, {"lambda", 0.3}});
  EXPECT_EQ(b.value({0.3, 0.4}), c.value({0.3, 0.4}));
  EXPECT_EQ(parse_field_spec("paraboloid").value({1.0, 2.0}), 5.0);
}

TEST(Families, ClosedForms) {
  EXPECT_NEAR(make_field("ridge", {{"lambda", 0.1}}).value({2.0, 5.0}), 1.0 + 0.1 * std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(make_field("cone_type", {{"lambda", 0.1}}).value({1.0, -2.0}),
              1.0 + 0.1 * (std::sqrt(2.0) + 1.0 + std::sqrt(5.0) - 2.0), 1e-15);
  const double t = 0.5 + 0.09;
  EXPECT_NEAR(make_field("bates_like", {{"lambda", 0.1}}).value({0.5, 0.3}),
              1.0 + 0.1 * t / std::sqrt(1.0 + t * t), 1e-15);
  EXPECT_NEAR(make_field("sphere_cap").value({0.6, 0.0}), 0.2, 1e-15);
  EXPECT_NEAR(make_field("asym_bump").value({1.0, 1.0}), std::exp(-2.0) * 1.5, 1e-15);
}

TEST(Families, LogLogTailCutoff) {
  const ScalarField f = make_field("loglog_tail");
  EXPECT_EQ(f.value({1.0, 1.0}), 0.0);
  const double r = 6.0;
  EXPECT_NEAR(f.value({r, 0.0}), std::log(std::log(r)), 1e-15);
  // C^2 across the outer end of the cutoff.
  const double e1 = std::numbers::e + 1.0;
  const Jet2 in = f.jet({e1 - 1e-9, 0.0});
  const Jet2 out = f.jet({e1 + 1e-9, 0.0});
  EXPECT_NEAR(in.f11, out.f11, 1e-6);
  EXPECT_NEAR(in.f1, out.f1, 1e-8);
}

TEST(Families, BatesLikeBoundedAndNotAsymptoticallyConstant) {
  const double lambda = 0.1;
  const ScalarField f = make_field("bates_like", {{"lambda", lambda}});
  double lo = 2.0, hi = 0.0, pmin = 1.0;
  for (int j = 0; j <= 80; ++j)
    for (int i = 0; i <= 80; ++i) {
      const Jet2 jt = f.jet({-10.0 + 0.25 * i, -10.0 + 0.25 * j});
      lo = std::min(lo, jt.f);
      hi = std::max(hi, jt.f);
      const auto r = umbilic_residuals(jt);
      pmin = std::min(pmin, std::max(std::abs(r.P1), std::abs(r.P2)));
    }
  EXPECT_GE(lo, 1.0 - lambda);
  EXPECT_LE(hi, 1.0 + lambda);
  EXPECT_GT(pmin, 0.0);
  EXPECT_EQ(find_family("bates_like").asymptotically_constant, Expectation::no);
  EXPECT_NEAR(f.value({1e6, 0.0}), 1.0 + lambda, 1e-9);
  EXPECT_NEAR(f.value({-1e6, 0.0}), 1.0 - lambda, 1e-9);
}

TEST(Families, ConeTypePositiveGaussCurvature) {
  const ScalarField f = make_field("cone_type", {{"lambda", 0.1}});
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) EXPECT_GT(f.jet({U(rng), U(rng)}).hessian_det(), 0.0);
}

TEST(Families, SeparableP1MatchesClosedFormAndKeepsSign) {
  // f = 1 + lambda (g(x) + h(y)) gives P1 = -lambda^3 g' h' g''.
  const double lambda = 0.2;
  for (int g = 0; g < 3; ++g)
    for (int h = 0; h < 3; ++h) {
      const ScalarField f = make_field(
          "separable", {{"lambda", lambda}, {"g", double(g)}, {"h", double(h)}});
      double sign = 0.0;
      for (int j = 0; j <= 20; ++j)
        for (int i = 0; i <= 20; ++i) {
          const Point2 p{-5.0 + 0.5 * i, -5.0 + 0.5 * j};
          const Jet2 jt = f.jet(p);
          const double gp = jt.f1 / lambda, hp = jt.f2 / lambda, gpp = jt.f11 / lambda;
          const double P1 = umbilic_residuals(jt).P1;
          const double closed = -lambda * lambda * lambda * gp * hp * gpp;
          EXPECT_NEAR(P1, closed, 1e-14 * std::abs(closed));
          EXPECT_NE(P1, 0.0);
          if (sign == 0.0) sign = P1 > 0 ? 1.0 : -1.0;
          EXPECT_EQ(P1 > 0 ? 1.0 : -1.0, sign);
        }
    }
}

TEST(Families, RidgeP2ClosedForm) {
  const double lambda = 0.1;
  const ScalarField f = make_field("ridge", {{"lambda", lambda}});
  for (double x : {-20.0, -1.0, 0.0, 0.5, 7.0}) {
    const Jet2 j = f.jet({x, 3.0});
    EXPECT_EQ(umbilic_residuals(j).P1, 0.0);
    EXPECT_NEAR(umbilic_residuals(j).P2, -lambda * std::pow(1.0 + x * x, -1.5), 1e-16);
  }
}

TEST(Families, DecayingBumpsAtRadiusTen) {
  for (const char* name : {"gaussian_bump", "inverse_quadratic"}) {
    const ScalarField f = make_field(name);
    const std::vector<double> radii{10.0};
    EXPECT_LT(decay_profile(f, radii).rows[0].sup_r_grad, 0.05) << name;
  }
}
