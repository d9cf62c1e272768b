#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "permuton_lab/networks.hpp"
#include "permuton_lab/transport.hpp"

namespace pl = permuton_lab;

TEST(Stanley, KnownValues) {
  EXPECT_EQ(pl::stanley_count(2), 1);
  EXPECT_EQ(pl::stanley_count(3), 2);
  EXPECT_EQ(pl::stanley_count(4), 16);
  EXPECT_EQ(pl::stanley_count(5), 768);
  EXPECT_EQ(pl::stanley_count(6), 292864);
}

TEST(Stanley, EnumerationAgrees) {
  for (int n = 2; n <= 6; ++n) EXPECT_EQ(pl::enumerate_sorting_networks(n), pl::stanley_count(n)) << n;
  EXPECT_THROW(pl::enumerate_sorting_networks(7), pl::Error);
}

TEST(Stanley, WordStreamYieldsReducedWordsOfReverse) {
  std::uint64_t count = 0;
  const auto total = pl::for_each_sorting_network(4, [&](const std::vector<int>& letters) {
    ++count;
    pl::TranspositionWord w{4, letters};
    EXPECT_EQ(w.compose(), pl::Permutation::reverse(4));
    EXPECT_EQ(letters.size(), 6u);
  });
  EXPECT_EQ(total, 16u);
  EXPECT_EQ(count, 16u);
}

TEST(TranspositionWord, BraidWordsComposeToReverse) {
  EXPECT_EQ((pl::TranspositionWord{3, {1, 2, 1}}.compose()), pl::Permutation::reverse(3));
  EXPECT_EQ((pl::TranspositionWord{3, {2, 1, 2}}.compose()), pl::Permutation::reverse(3));
  EXPECT_THROW((pl::TranspositionWord{3, {3}}.validate()), pl::Error);
}

TEST(WalkVector, TotalIsConserved) {
  pl::WalkVector w(4);
  for (int step = 1; step <= 12; ++step) {
    w.step();
    EXPECT_EQ(w.total(), boost::multiprecision::pow(pl::BigInt(3), static_cast<unsigned>(step)));
  }
  EXPECT_EQ(w.order(), 24u);
}

TEST(RelaxedExact, Examples) {
  EXPECT_EQ(pl::relaxed_count_exact(2, 1, 0.4), 1);
  EXPECT_EQ(pl::relaxed_count_exact(3, 3, 1e-6), 2);
  EXPECT_EQ(pl::relaxed_count_exact(3, 2, 1e-6), 0);
}

TEST(RelaxedExact, ParityObstruction) {
  for (int n = 3; n <= 5; ++n) {
    const std::size_t half = static_cast<std::size_t>(n * (n - 1) / 2);
    for (std::size_t m = half; m < half + 6; ++m) {
      const auto c = pl::relaxed_count_exact(n, m, 1e-9);
      if ((m - half) % 2 == 1) {
        EXPECT_EQ(c, 0) << n << " " << m;
      }
    }
  }
}

TEST(RelaxedExact, MonotoneInDelta) {
  pl::BigInt prev = 0;
  for (double d : {0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 1.0}) {
    const auto c = pl::relaxed_count_exact(4, 10, d);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(RelaxedExact, SmallDeltaCountsWalksToReverse) {
  pl::WalkVector w(4);
  for (int i = 0; i < 8; ++i) w.step();
  const auto at_rev = w.weights()[w.rank(pl::Permutation::reverse(4))];
  const auto d = pl::distances_to_reverse(w);
  double min_positive = std::numeric_limits<double>::infinity();
  for (double v : d)
    if (v > 0) min_positive = std::min(min_positive, v);
  EXPECT_EQ(pl::relaxed_count_exact(4, 8, 0.5 * min_positive), at_rev);
}

TEST(RelaxedExact, FullDeltaCountsEveryWord) {
  EXPECT_EQ(pl::relaxed_count_exact(4, 7, 10.0), boost::multiprecision::pow(pl::BigInt(3), 7u));
}

TEST(IsDeltaRelaxed, Examples) {
  EXPECT_TRUE((pl::is_delta_relaxed({3, {1, 2, 1}}, 0.0)));
  EXPECT_FALSE((pl::is_delta_relaxed({2, {}}, 0.4)));
  EXPECT_TRUE((pl::is_delta_relaxed({2, {}}, 0.6)));
}

TEST(RelaxedLength, Formula) {
  // floor(1/2 * 5^1.5 * 4) = floor(22.36)
  EXPECT_EQ(pl::relaxed_length(5, 0.5), 22u);
}

TEST(RelaxedEstimate, InfiniteDeltaIsExact) {
  pl::RelaxedEstimateOptions o;
  o.n = 5;
  o.delta = std::numeric_limits<double>::infinity();
  o.replicas = 100;
  const auto e = pl::relaxed_count_estimate(o);
  EXPECT_EQ(e.log_count, 22 * std::log(4.0));
  EXPECT_EQ(e.log_probability, 0.0);
}

TEST(RelaxedEstimate, PoissonizedModeRuns) {
  pl::RelaxedEstimateOptions o;
  o.n = 5;
  o.delta = 0.2;
  o.replicas = 2000;
  o.mode = pl::LengthMode::kPoissonized;
  const auto e = pl::relaxed_count_estimate(o);
  EXPECT_GT(e.hits, 0u);
  EXPECT_TRUE(std::isfinite(e.log_count));
}

TEST(RelaxedEstimate, AgreesWithExactSmall) {
  pl::RelaxedEstimateOptions o;
  o.n = 4;
  o.kappa = 0.5;
  o.delta = 0.15;
  o.replicas = 4000;
  o.seed = 3;
  const auto e = pl::relaxed_count_estimate(o);
  const double exact = std::log(pl::relaxed_count_exact(4, e.length, 0.15).convert_to<double>());
  EXPECT_NEAR(e.log_count, exact, 3.0 * e.std_error);
}

TEST(RelaxedEstimate, RequiresEnoughReplicas) {
  pl::RelaxedEstimateOptions o;
  o.replicas = 10;
  EXPECT_THROW(pl::relaxed_count_estimate(o), pl::Error);
}
