#include <gtest/gtest.h>

#include <cmath>

#include "permuton_lab/core.hpp"
#include "permuton_lab/rng.hpp"

namespace pl = permuton_lab;

namespace {

void expect_points(const pl::Permuton2D& mu, const std::vector<pl::Permuton2D::Point>& expected) {
  ASSERT_EQ(mu.points().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_DOUBLE_EQ(mu.points()[i].x, expected[i].x);
    EXPECT_DOUBLE_EQ(mu.points()[i].y, expected[i].y);
  }
}

pl::SteppedPath linear_path(double slope, double stop) {
  return pl::SteppedPath::sampled({0.0, stop, 1.0}, {0.0, slope * stop, slope * stop});
}

pl::Permutation random_permutation(int n, pl::ReplicaStream& rng) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(m.begin(), m.end(), rng);
  return pl::Permutation(m);
}

}  // namespace

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(pl::Permutation({1, 1}), pl::Error);
  EXPECT_THROW(pl::Permutation({0, 1}), pl::Error);
}

TEST(Permutation, InverseAndCompose) {
  const pl::Permutation p({2, 3, 1});
  EXPECT_EQ(p.compose(p.inverse()), pl::Permutation::identity(3));
  EXPECT_EQ(pl::Permutation::reverse(4).inversions(), 6);
  EXPECT_EQ(pl::Permutation::identity(4).inversions(), 0);
}

TEST(EmpiricalPermuton, IdentityTwo) {
  expect_points(pl::empirical_permuton(pl::Permutation::identity(2)), {{0.5, 0.5}, {1.0, 1.0}});
}

TEST(EmpiricalPermuton, ReverseTwo) {
  expect_points(pl::empirical_permuton(pl::Permutation::reverse(2)), {{0.5, 1.0}, {1.0, 0.5}});
}

TEST(EmpiricalPermuton, ReverseThree) {
  expect_points(pl::empirical_permuton(pl::Permutation::reverse(3)),
                {{1.0 / 3, 1.0}, {2.0 / 3, 2.0 / 3}, {1.0, 1.0 / 3}});
}

TEST(PathEnergy, ConstantPathIsZero) {
  const auto p = pl::SteppedPath::constant(0.0, 1.0, 0.3);
  EXPECT_EQ(pl::path_energy(p, pl::Partition::dyadic(0.0, 1.0, 6)), 0.0);
  EXPECT_EQ(pl::path_energy(p, pl::Partition({0.0, 0.1, 1.0})), 0.0);
}

TEST(PathEnergy, LinearPathIsOneHalf) {
  const auto p = pl::SteppedPath::sampled({0.0, 1.0}, {0.0, 1.0});
  for (int depth : {0, 1, 5, 10}) EXPECT_NEAR(pl::path_energy(p, pl::Partition::dyadic(0.0, 1.0, depth)), 0.5, 1e-12);
  EXPECT_NEAR(pl::path_energy(p, pl::Partition({0.0, 0.3, 0.35, 1.0})), 0.5, 1e-12);
}

TEST(PathEnergy, StopAtHalfDepthOne) {
  EXPECT_NEAR(pl::path_energy(linear_path(1.0, 0.5), pl::Partition::dyadic(0.0, 1.0, 1)), 0.25, 1e-15);
}

TEST(PathEnergy, PartitionOutsideDomainThrows) {
  const auto p = pl::SteppedPath::constant(0.0, 1.0, 0.0);
  EXPECT_THROW(pl::path_energy(p, pl::Partition({0.0, 2.0})), pl::Error);
}

TEST(ProcessEnergy, ConstantEnsemble) {
  pl::PathEnsemble e({pl::SteppedPath::constant(0.0, 1.0, 0.1), pl::SteppedPath::constant(0.0, 1.0, 0.9)});
  for (int depth : {0, 3, 8}) EXPECT_EQ(pl::process_energy(e, depth), 0.0);
}

TEST(ProcessEnergy, SingleLinearPath) {
  pl::PathEnsemble e({pl::SteppedPath::sampled({0.0, 1.0}, {0.0, 1.0})});
  for (int depth : {0, 3, 8, 10}) EXPECT_NEAR(pl::process_energy(e, depth), 0.5, 1e-12);
}

TEST(ProcessEnergy, RefinementNeverDecreases) {
  pl::ReplicaStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<pl::SteppedPath::Jump> jumps;
    double t = 0.0;
    for (int k = 0; k < 20; ++k) {
      t += rng.uniform() * 0.08;
      if (t >= 1.0) break;
      jumps.push_back({t, rng.uniform()});
    }
    pl::PathEnsemble e({pl::SteppedPath::stepped(0.0, 1.0, 0.5, jumps)});
    double prev = 0.0;
    for (int depth = 0; depth <= 12; ++depth) {
      const double cur = pl::process_energy(e, depth);
      EXPECT_GE(cur, prev * (1.0 - 1e-12));
      prev = cur;
    }
  }
}

TEST(SteppedPath, CadlagEvaluation) {
  const auto p = pl::SteppedPath::stepped(0.0, 1.0, 0.5, {{0.3, 1.0}});
  EXPECT_EQ(p(0.29), 0.5);
  EXPECT_EQ(p(0.3), 1.0);
  EXPECT_EQ(p(1.0), 1.0);
}

TEST(PermutationEnergy, Examples) {
  EXPECT_EQ(pl::permutation_energy(pl::Permutation::identity(7)), 0.0);
  EXPECT_NEAR(pl::permutation_energy(pl::Permutation::reverse(2)), 1.0 / 8, 1e-15);
  EXPECT_NEAR(pl::permutation_energy(pl::Permutation::reverse(3)), 4.0 / 27, 1e-15);
}

TEST(PermutationEnergy, AgreesWithEmpiricalPermuton) {
  pl::ReplicaStream rng(3, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_permutation(1 + static_cast<int>(rng.below(40)), rng);
    EXPECT_EQ(pl::permutation_energy(s), pl::permuton_energy(pl::empirical_permuton(s)));
  }
}

TEST(PermutonEnergy, IdentityIsZero) {
  EXPECT_EQ(pl::permuton_energy(pl::empirical_permuton(pl::Permutation::identity(9))), 0.0);
  EXPECT_EQ(pl::permuton_energy(pl::diagonal_grid(64, false)), 0.0);
}

TEST(PermutonEnergy, ReverseIsOneSixth) {
  // The m-cell anti-diagonal has energy (m^2 - 1) / (6 m^2).
  const std::size_t m = 512;
  EXPECT_NEAR(pl::permuton_energy(pl::diagonal_grid(m, true)), 1.0 / 6, 1.0 / (m * m));
  const int n = 1000;
  EXPECT_NEAR(pl::permuton_energy(pl::empirical_permuton(pl::Permutation::reverse(n))), 1.0 / 6, 1.0 / n);
}

TEST(PermutonEnergy, UniformIsOneTwelfth) {
  const std::size_t m = 256;
  const pl::Permuton2D u = pl::Permuton2D::from_grid(m, std::vector<double>(m * m, 1.0 / (m * m)));
  EXPECT_NEAR(pl::permuton_energy(u), 1.0 / 12, 1.0 / (m * m));
}

TEST(Permuton2D, GridMarginalsChecked) {
  std::vector<double> w(4, 0.0);
  w[0] = 0.5;
  w[1] = 0.5;  // row 0 carries all mass
  EXPECT_THROW(pl::Permuton2D::from_grid(2, w), pl::Error);
  EXPECT_NO_THROW(pl::Permuton2D::from_grid(2, w, false));
}

TEST(Permuton2D, BinnedPreservesMass) {
  const auto pts = pl::empirical_permuton(pl::Permutation::reverse(64));
  const auto grid = pl::Permuton2D::binned(pts, 8);
  double total = 0.0;
  for (double w : grid.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(grid.cell(0, 7), 1.0 / 8, 1e-12);
}

TEST(Partition, DyadicAndUniform) {
  const auto d = pl::Partition::dyadic(0.0, 2.0, 3);
  ASSERT_EQ(d.size(), 9u);
  EXPECT_EQ(d.times()[4], 1.0);
  EXPECT_THROW(pl::Partition({0.0, 0.0}), pl::Error);
  EXPECT_EQ(pl::Partition::uniform(0.0, 1.0, 4).times()[1], 0.25);
}

TEST(ReplicaStream, DeterministicAndIndependentPerReplica) {
  pl::ReplicaStream a(5, 1), b(5, 1), c(5, 2);
  const auto x = a(), y = b(), z = c();
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
  pl::ReplicaStream r(9, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform_open();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}
