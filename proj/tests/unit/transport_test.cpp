#include <gtest/gtest.h>

#include <cmath>

#include "permuton_lab/core.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/rng.hpp"
#include "permuton_lab/transport.hpp"

namespace pl = permuton_lab;

namespace {

pl::Permuton2D random_cloud(std::size_t n, pl::ReplicaStream& rng) {
  std::vector<pl::Permuton2D::Point> pts(n);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  return pl::Permuton2D::from_points(pts);
}

pl::SteppedPath line(double a, double b) { return pl::SteppedPath::sampled({0.0, 1.0}, {a, b}); }

}  // namespace

TEST(Assignment, MatchesBruteForce) {
  pl::ReplicaStream rng(2, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    pl::CostMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = rng.uniform() * 10.0 - 3.0;
    const auto a = pl::solve_assignment(c);
    EXPECT_NEAR(a.total_cost, pl::brute_force_assignment(c), 1e-9);
    std::vector<int> used(n, 0);
    for (std::size_t j : a.column_of_row) used[j] += 1;
    for (int u : used) EXPECT_EQ(u, 1);
  }
}

TEST(WassersteinPoints, IdenticalIsZero) {
  pl::ReplicaStream rng(4, 0);
  const auto a = random_cloud(30, rng);
  EXPECT_NEAR(pl::wasserstein_points(a, a), 0.0, 1e-15);
}

TEST(WassersteinPoints, IdentityVersusReverseTwo) {
  EXPECT_NEAR(pl::wasserstein_points(pl::empirical_permuton(pl::Permutation::identity(2)),
                                     pl::empirical_permuton(pl::Permutation::reverse(2))),
              0.5, 1e-15);
}

TEST(WassersteinPoints, SinglePointMasses) {
  const auto p = pl::Permuton2D::from_points({{0.1, 0.2}});
  const auto q = pl::Permuton2D::from_points({{0.4, 0.6}});
  EXPECT_NEAR(pl::wasserstein_points(p, q), 0.5, 1e-15);
}

TEST(WassersteinPoints, UnequalSizesUseDuplication) {
  // Two points at 0 and 1 on a line versus one point at 0.5: each unit moves 0.5.
  const auto a = pl::Permuton2D::from_points({{0.0, 0.0}, {1.0, 0.0}});
  const auto b = pl::Permuton2D::from_points({{0.5, 0.0}});
  EXPECT_NEAR(pl::wasserstein_points(a, b), 0.5, 1e-15);
}

TEST(WassersteinPoints, LargeCoprimeSizesUseSimplex) {
  // lcm(97, 89) exceeds the duplication cap; both routes must agree with the
  // duplicated assignment on a small subproblem scaled up.
  pl::ReplicaStream rng(8, 0);
  const auto a = random_cloud(97, rng);
  const auto b = random_cloud(89, rng);
  const double simplex = pl::wasserstein_points(a, b);
  std::vector<pl::WeightedPoint> sa, sb;
  for (const auto& p : a.points()) sa.push_back({p.x, p.y, 1.0 / 97});
  for (const auto& p : b.points()) sb.push_back({p.x, p.y, 1.0 / 89});
  EXPECT_NEAR(simplex, pl::transport_exact(sa, sb).value, 1e-12);
  EXPECT_LE(pl::transport_entropic(sa, sb).value, simplex + 0.02);
}

TEST(TransportExact, AgreesWithAssignmentOnEqualClouds) {
  pl::ReplicaStream rng(9, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_cloud(12, rng);
    const auto b = random_cloud(12, rng);
    std::vector<pl::WeightedPoint> sa, sb;
    for (const auto& p : a.points()) sa.push_back({p.x, p.y, 1.0 / 12});
    for (const auto& p : b.points()) sb.push_back({p.x, p.y, 1.0 / 12});
    EXPECT_NEAR(pl::transport_exact(sa, sb).value, pl::wasserstein_points(a, b), 1e-12);
  }
}

TEST(WassersteinGrid, IdenticalIsZero) {
  const auto g = pl::diagonal_grid(16, true);
  EXPECT_NEAR(pl::wasserstein_grid(g, g).value, 0.0, 1e-12);
}

TEST(WassersteinGrid, IdentityVersusReverseMatchesPoints) {
  const std::size_t m = 64;
  const double grid = pl::wasserstein_grid(pl::diagonal_grid(m, false), pl::diagonal_grid(m, true)).value;
  const double points = pl::wasserstein_points(pl::empirical_permuton(pl::Permutation::identity(64)),
                                               pl::empirical_permuton(pl::Permutation::reverse(64)));
  EXPECT_NEAR(grid, points, 2.0 / m);
}

TEST(WassersteinGrid, RejectsUnnormalizedGrid) {
  EXPECT_THROW(pl::Permuton2D::from_grid(2, {0.5, 0.5, 0.5, 0.5}), pl::Error);
}

TEST(WassersteinGrid, ArchimedeanGridAgainstSineSamples) {
  // The grid law of (A_0, A_1/2) on the unit chart against binned samples.
  const std::size_t m = 64;
  const pl::Permuton2D grid = pl::archimedean_grid(m);
  pl::ReplicaStream rng(21, 0);
  std::vector<pl::Permuton2D::Point> pts;
  for (int i = 0; i < 10000; ++i) {
    const pl::Point2 p = pl::archimedean_sample(rng);
    pts.push_back({(pl::sine_position(p, 0.0) + 1.0) / 2.0, (pl::sine_position(p, 0.5) + 1.0) / 2.0});
  }
  const auto d = pl::wasserstein_grid(grid, pl::Permuton2D::from_points(pts));
  EXPECT_LE(d.value, 0.05);
}

TEST(PathEnsembleDistance, IdenticalIsZero) {
  pl::PathEnsemble e({line(0.1, 0.9), line(0.4, 0.2)});
  EXPECT_EQ(pl::path_ensemble_distance(e, e), 0.0);
}

TEST(PathEnsembleDistance, SingletonConstants) {
  pl::PathEnsemble a({pl::SteppedPath::constant(0.0, 1.0, 0.2)});
  pl::PathEnsemble b({pl::SteppedPath::constant(0.0, 1.0, 0.75)});
  EXPECT_NEAR(pl::path_ensemble_distance(a, b), 0.55, 1e-15);
}

TEST(PathEnsembleDistance, MatchingPermutesPaths) {
  pl::PathEnsemble a({line(0.0, 1.0), line(1.0, 0.0)});
  pl::PathEnsemble b({line(1.0, 0.0), line(0.0, 1.0)});
  EXPECT_EQ(pl::path_ensemble_distance(a, b), 0.0);
}

TEST(PathEnsembleDistance, SupOverJumpTimes) {
  // A jump of size 0.5 held on [0.3, 0.4) is seen on the default grid.
  pl::PathEnsemble a({pl::SteppedPath::stepped(0.0, 1.0, 0.0, {{0.3, 0.5}, {0.4, 0.0}})});
  pl::PathEnsemble b({pl::SteppedPath::constant(0.0, 1.0, 0.0)});
  EXPECT_NEAR(pl::path_ensemble_distance(a, b), 0.5, 1e-15);
}

TEST(PathEnsembleDistance, SizeMismatchThrows) {
  pl::PathEnsemble a({line(0.0, 1.0)});
  pl::PathEnsemble b({line(0.0, 1.0), line(1.0, 0.0)});
  EXPECT_THROW(pl::path_ensemble_distance(a, b), pl::Error);
}
