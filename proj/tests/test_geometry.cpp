#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>
#include <random>

#include "umbilic/geometry.hpp"
#include "umbilic/parallel.hpp"

using namespace umbilic;

TEST(Geometry, RotationBetweenMapsFromOntoTo) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  for (int i = 0; i < 200; ++i) {
    const Vec3 a = normalized({N(rng), N(rng), N(rng)});
    const Vec3 b = normalized({N(rng), N(rng), N(rng)});
    const Mat3 R = rotation_between(a, b);
    EXPECT_LT(norm(R * a - b), 1e-14);
    const Mat3 I = R * R.transposed();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(I(r, c), r == c ? 1.0 : 0.0, 1e-14);
  }
}

TEST(Geometry, RotationBetweenAntipodalAndEqual) {
  const Vec3 z{0, 0, 1};
  EXPECT_LT(norm(rotation_between(z, -z) * z + z), 1e-15);
  EXPECT_LT(norm(rotation_between(z, z) * Vec3{1, 2, 3} - Vec3{1, 2, 3}), 1e-15);
}

TEST(Geometry, AxisAngleQuarterTurn) {
  const Mat3 R = axis_angle({0, 0, 1}, 0.5 * pi);
  EXPECT_LT(norm(R * Vec3{1, 0, 0} - Vec3{0, 1, 0}), 1e-15);
}

TEST(Geometry, LineAngleIsUnoriented) {
  EXPECT_NEAR(line_angle({1, 0, 0}, {-1, 0, 0}), 0.0, 1e-15);
  EXPECT_NEAR(line_angle({1, 0, 0}, {0, 3, 0}), 0.5 * pi, 1e-15);
  EXPECT_NEAR(line_angle({1, 0, 0}, {1, 1, 0}), 0.25 * pi, 1e-15);
}

TEST(Geometry, PolarRoundTrip) {
  for (double th : {-3.0, -0.5, 0.0, 1.0, 3.1}) {
    const Point2 p = to_cartesian(2.5, th);
    const PolarPoint q = to_polar(p);
    EXPECT_NEAR(q.r, 2.5, 1e-15);
    EXPECT_LT(norm(to_cartesian(q) - p), 1e-14);
  }
  EXPECT_NEAR(reduce_angle(7.0), 7.0 - two_pi, 1e-15);
}

TEST(Geometry, DirectionPerp) {
  const Direction d(0.3);
  EXPECT_NEAR(dot(d.vec(), d.perp().vec()), 0.0, 1e-16);
  EXPECT_NEAR(Direction::from_vector({0, 2}).theta(), 0.5 * pi, 1e-15);
}

TEST(Parallel, PairwiseSumMatchesExactIntegers) {
  std::vector<double> v(1001);
  std::iota(v.begin(), v.end(), 0.0);
  EXPECT_EQ(pairwise_sum(v), 1000.0 * 1001.0 / 2.0);
  EXPECT_EQ(pairwise_sum(std::span<const double>{}), 0.0);
}

TEST(Parallel, ResultIndependentOfWorkerCount) {
  auto run = [] {
    std::vector<double> out(10007);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = std::sin(0.001 * i) / (1.0 + i); });
    return pairwise_sum(out);
  };
  setenv("UMBILIC_THREADS", "1", 1);
  const double one = run();
  setenv("UMBILIC_THREADS", "4", 1);
  const double four = run();
  unsetenv("UMBILIC_THREADS");
  EXPECT_EQ(one, four);
}

TEST(Parallel, ExceptionPropagates) {
  setenv("UMBILIC_THREADS", "3", 1);
  EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                 if (i == 57) throw DomainError("boom");
               }),
               DomainError);
  unsetenv("UMBILIC_THREADS");
}

TEST(Parallel, WorkerCountReadsEnvironment) {
  setenv("UMBILIC_THREADS", "5", 1);
  EXPECT_EQ(worker_count(), 5u);
  setenv("UMBILIC_THREADS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("UMBILIC_THREADS");
}
