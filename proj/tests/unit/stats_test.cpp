#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "permuton_lab/parallel.hpp"
#include "permuton_lab/rng.hpp"
#include "permuton_lab/stats.hpp"

namespace pl = permuton_lab;

TEST(Stats, MeanAndStderr) {
  const auto m = pl::mean_and_stderr({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  // sample variance 5/3, stderr sqrt(5/12)
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 12.0), 1e-15);
}

TEST(Stats, LogMeanExpMatchesDirect) {
  const std::vector<double> lw{-1.0, 0.5, 2.0, -3.0};
  double direct = 0.0;
  for (double x : lw) direct += std::exp(x);
  EXPECT_NEAR(pl::log_mean_exp(lw).mean, std::log(direct / 4.0), 1e-14);
  EXPECT_NEAR(pl::log_sum_exp({1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(pl::log_sum_exp({-std::numeric_limits<double>::infinity()}), -std::numeric_limits<double>::infinity());
}

TEST(Stats, PairwiseSumExactOnIntegers) {
  std::vector<double> xs(100001);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
  EXPECT_EQ(pl::pairwise_sum(xs), 100000.0 * 100001.0 / 2.0);
}

TEST(Stats, KsUniform) {
  // Grid midpoints sit at distance 1/(2n) from the uniform CDF.
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back((i + 0.5) / 100.0);
  EXPECT_NEAR(pl::ks_uniform(xs), 0.005, 1e-12);
  EXPECT_NEAR(pl::ks_uniform({0.0, 0.0}, 0.0, 1.0), 1.0, 1e-12);
}

TEST(Stats, ChiSquareUniform) {
  const auto flat = pl::chi_square_uniform({10, 10, 10, 10});
  EXPECT_EQ(flat.statistic, 0.0);
  EXPECT_EQ(flat.dof, 3.0);
  EXPECT_NEAR(flat.p_value, 1.0, 1e-12);
  // statistic (400 + 0 + 100 + 100) / 10 = 60 with 3 dof: p from scipy chi2.sf
  const auto skew = pl::chi_square_uniform({30, 10, 0, 0});
  EXPECT_NEAR(skew.statistic, 60.0, 1e-12);
  EXPECT_NEAR(skew.p_value, 5.878230727906921e-13, 1e-20);
}

TEST(Stats, ChiSquareUniform2dOnUniformSample) {
  pl::ReplicaStream rng(1, 0);
  std::vector<double> xs, ys;
  for (int i = 0; i < 20000; ++i) {
    xs.push_back(rng.uniform());
    ys.push_back(rng.uniform());
  }
  const auto r = pl::chi_square_uniform_2d(xs, ys, 10);
  EXPECT_EQ(r.dof, 99.0);
  EXPECT_GT(r.p_value, 1e-4);
}

TEST(Stats, Median) {
  EXPECT_EQ(pl::median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(pl::median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(Parallel, CoversEveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 5u}) {
    std::vector<int> hits(1000, 0);
    pl::parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(pl::parallel_for(10, 2,
                                [](std::size_t i) {
                                  if (i == 7) throw std::runtime_error("boom");
                                }),
               std::runtime_error);
}
