#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "permuton_lab/estimators.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/interchange.hpp"
#include "permuton_lab/rng.hpp"
#include "permuton_lab/stats.hpp"

namespace pl = permuton_lab;

namespace {

std::size_t sz(int i) { return static_cast<std::size_t>(i); }

pl::RateTable scaled_sine_rates(int n, double alpha, double scale, double delta = 1.0, double horizon = 1.0) {
  const auto field = pl::piecewise_time(pl::smooth_boundary(pl::sine_field(), 0.05), delta, horizon);
  const pl::StreamFunction f = [field, scale](double t, double x, double phi) { return scale * field->stream(t, x, phi); };
  return pl::discrete_rates(f, n, alpha, delta, horizon, false, true);
}

// Independent replay of the swap-only log-likelihood ratio against the
// colored unbiased process.
double brute_force_log_weight(const pl::EventLog& log, const pl::RateTable& rt) {
  pl::Configuration c = log.initial;
  double w = 0.0;
  for (const auto& e : log.events) {
    const int x = static_cast<int>(e.site);
    const std::size_t k = rt.epoch_at(e.time);
    if (e.kind == pl::EventKind::kSwap) {
      w -= std::log1p(rt.epsilon() * (rt.v(k, x, c.color_at(x)) - rt.v(k, x + 1, c.color_at(x + 1))));
      c.swap_sites(x);
    } else {
      c.color[sz(c.particle[sz(x)])] += e.kind == pl::EventKind::kColorUp ? 1 : -1;
    }
  }
  return w;
}

// Independent replay of log M_t^S.
double brute_force_martingale(const pl::EventLog& log, const pl::TiltVector& s, double t) {
  const int n = log.n;
  const double eps = std::pow(n, 1.0 - log.alpha), base = 0.5 * std::pow(n, log.alpha);
  pl::Configuration c = log.initial;
  double comp = 0.0, prev = 0.0;
  auto rate = [&]() {
    double sum = 0.0;
    for (int x = 1; x < n; ++x) sum += std::expm1(eps * (s(c.particle[sz(x)]) - s(c.particle[sz(x + 1)])));
    return sum;
  };
  for (const auto& e : log.events) {
    if (e.time > t) break;
    comp += base * rate() * (e.time - prev);
    prev = e.time;
    if (e.kind == pl::EventKind::kSwap) c.swap_sites(static_cast<int>(e.site));
  }
  comp += base * rate() * (t - prev);
  double drift = 0.0;
  for (int i = 1; i <= n; ++i) drift += eps * s(i) * (c.position[sz(i)] - log.initial.position[sz(i)]);
  return drift - comp;
}

}  // namespace

TEST(RadonNikodym, ZeroRatesGiveZero) {
  const auto rt = pl::discrete_rates(*pl::zero_field(), 16, 1.5, 1.0, 1.0);
  const auto log = pl::simulate_biased(rt, 1.0, 3);
  const auto w = pl::radon_nikodym_log(log, rt);
  EXPECT_EQ(w.value, 0.0);
  EXPECT_EQ(pl::radon_nikodym_log(log, rt, pl::Reference::kFullyUnbiased).value, 0.0);
}

TEST(RadonNikodym, MatchesBruteForceReplay) {
  const auto rt = scaled_sine_rates(12, 1.5, 1.0, 0.25, 1.0);
  ASSERT_EQ(rt.epochs(), 4u);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto log = pl::simulate_biased(rt, 1.0, seed);
    const auto w = pl::radon_nikodym_log(log, rt);
    EXPECT_NEAR(w.value, brute_force_log_weight(log, rt), 1e-9);
    EXPECT_NEAR(w.compensator, 0.0, 1e-12);
    EXPECT_GT(w.energy_integral, 0.0);
  }
}

TEST(RadonNikodym, RejectsMismatchedSize) {
  const auto rt = scaled_sine_rates(12, 1.5, 1.0);
  const auto other = scaled_sine_rates(10, 1.5, 1.0);
  const auto log = pl::simulate_biased(other, 0.2, 1);
  EXPECT_THROW(pl::radon_nikodym_log(log, rt), pl::Error);
}

TEST(RadonNikodym, FullyUnbiasedReferenceHasMeanOne) {
  const int n = 16;
  const auto rt = scaled_sine_rates(n, 1.5, 0.2);
  std::vector<double> lw;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    pl::SimulationOptions o;
    o.replica = r;
    lw.push_back(pl::radon_nikodym_log(pl::simulate_biased(rt, 1.0, 5, nullptr, o), rt,
                                       pl::Reference::kFullyUnbiased).value);
  }
  std::vector<double> w;
  for (double x : lw) w.push_back(std::exp(x));
  const auto m = pl::mean_and_stderr(w);
  EXPECT_NEAR(m.mean, 1.0, 3.0 * m.std_error);
}

TEST(RadonNikodym, ChangeOfMeasureForTerminalEnergy) {
  const int n = 32;
  const auto rt = scaled_sine_rates(n, 1.5, 0.3);
  std::vector<double> weighted, plain;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    pl::SimulationOptions o;
    o.replica = r;
    const auto biased = pl::simulate_biased(rt, 1.0, 9, nullptr, o);
    const auto final_b = pl::snapshots(biased, {1.0}).front().positions_as_permutation();
    const auto disp_b = biased.initial.positions_as_permutation().inverse().compose(final_b);
    weighted.push_back(pl::permutation_energy(disp_b) * std::exp(pl::radon_nikodym_log(biased, rt).value));
    const auto unbiased = pl::simulate_unbiased(n, 1.5, 1.0, 10, nullptr, o);
    const auto final_u = pl::snapshots(unbiased, {1.0}).front().positions_as_permutation();
    plain.push_back(pl::permutation_energy(unbiased.initial.positions_as_permutation().inverse().compose(final_u)));
  }
  const auto a = pl::mean_and_stderr(weighted), b = pl::mean_and_stderr(plain);
  EXPECT_NEAR(a.mean, b.mean, 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST(Martingale, ZeroTiltIsZero) {
  const auto log = pl::simulate_unbiased(8, 1.5, 1.0, 2);
  EXPECT_EQ(pl::exponential_martingale_log(log, pl::TiltVector::zero(8, 1.0), 1.0), 0.0);
}

TEST(Martingale, TwoParticleClosedForm) {
  const double alpha = 1.5;
  pl::EventLog log;
  log.n = 2;
  log.alpha = alpha;
  log.horizon = 1.0;
  log.initial = pl::Configuration::identity(2, {1, 2});
  log.events = {{0.2, pl::EventKind::kSwap, 1}, {0.5, pl::EventKind::kSwap, 1}};
  const pl::TiltVector s({0.5, -0.5}, 1.0);
  const double eps = std::pow(2.0, 1.0 - alpha), base = 0.5 * std::pow(2.0, alpha);
  const double up = std::expm1(eps), down = std::expm1(-eps);
  EXPECT_NEAR(pl::exponential_martingale_log(log, s, 1.0), -base * (0.7 * up + 0.3 * down), 1e-14);
  EXPECT_NEAR(pl::exponential_martingale_log(log, s, 0.4), eps - base * (0.2 * up + 0.2 * down), 1e-14);
}

TEST(Martingale, MatchesBruteForceAtSeveralTimes) {
  const int n = 10;
  pl::ReplicaStream rng(4, 0);
  std::vector<int> j(sz(n));
  for (int& v : j) v = static_cast<int>(rng.below(5)) - 2;
  const auto s = pl::TiltVector::from_lattice(j, 1.0);
  const auto log = pl::simulate_unbiased(n, 1.5, 1.0, 6);
  for (double t : {0.0, 0.1, 0.37, 1.0})
    EXPECT_NEAR(pl::exponential_martingale_log(log, s, t), brute_force_martingale(log, s, t), 1e-9);
}

TEST(Martingale, MeanOneSmall) {
  const int n = 16;
  pl::ReplicaStream rng(12, 0);
  std::vector<int> j(sz(n));
  for (int& v : j) v = static_cast<int>(rng.below(5)) - 2;
  const auto s = pl::TiltVector::from_lattice(j, 1.0);
  std::vector<double> w;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    pl::SimulationOptions o;
    o.replica = r;
    w.push_back(std::exp(pl::exponential_martingale_log(pl::simulate_unbiased(n, 1.5, 1.0, 13, nullptr, o), s, 1.0)));
  }
  const auto m = pl::mean_and_stderr(w);
  EXPECT_NEAR(m.mean, 1.0, 3.0 * m.std_error);
}

TEST(TiltVector, LatticeEnforced) {
  EXPECT_THROW(pl::TiltVector({0.3, 0.0}, 1.0), pl::Error);
  EXPECT_THROW(pl::TiltVector({1.0, 0.0}, 1.0), pl::Error);  // |j| = 2 > N - 1
  EXPECT_NO_THROW(pl::TiltVector({0.5, -0.5}, 1.0));
}

TEST(OptimalTilt, IdentityIsZero) {
  const auto s = pl::optimal_tilt(pl::Permutation::identity(6), 1.0);
  for (double v : s.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(pl::tilt_exponent(s, pl::Permutation::identity(6)), 0.0);
}

TEST(OptimalTilt, ReverseThree) {
  const auto rev = pl::Permutation::reverse(3);
  const auto s = pl::optimal_tilt(rev, 1.0);
  EXPECT_NEAR(s(1), 2.0 / 3, 1e-15);
  EXPECT_EQ(s(2), 0.0);
  EXPECT_NEAR(s(3), -2.0 / 3, 1e-15);
  EXPECT_NEAR(pl::tilt_exponent(s, rev), 4.0 / 27, 1e-15);
}

TEST(OptimalTilt, ExponentEqualsEnergyOverTime) {
  pl::ReplicaStream rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(30));
    std::vector<int> m(sz(n));
    for (int i = 0; i < n; ++i) m[sz(i)] = i + 1;
    std::shuffle(m.begin(), m.end(), rng);
    const pl::Permutation sigma(m);
    const double t = 0.25 + rng.uniform() * 2;
    EXPECT_NEAR(pl::tilt_exponent(pl::optimal_tilt(sigma, t), sigma), pl::one_slice_upper_rate(sigma, t), 1e-12);
  }
}

TEST(OneSliceUpperRate, Examples) {
  EXPECT_EQ(pl::one_slice_upper_rate(pl::Permutation::identity(5), 1.0), 0.0);
  EXPECT_NEAR(pl::one_slice_upper_rate(pl::Permutation::reverse(3), 1.0), 4.0 / 27, 1e-15);
  for (int n : {2, 7, 50}) {
    const double nd = n;
    EXPECT_NEAR(pl::one_slice_upper_rate(pl::Permutation::reverse(n), 2.0), (nd * nd - 1) / (12 * nd * nd), 1e-15);
  }
  EXPECT_THROW(pl::one_slice_upper_rate(pl::Permutation::identity(2), 0.0), pl::Error);
}

TEST(OneBlock, ConstantColorsGiveZero) {
  pl::SiteObservables obs{std::vector<double>(8, 0.7), std::vector<double>(8, -0.2)};
  const auto r = pl::one_block_statistic({obs, obs}, 2);
  EXPECT_NEAR(r.time_averaged, 0.0, 1e-15);
  EXPECT_NEAR(r.per_snapshot, 0.0, 1e-15);
}

TEST(OneBlock, AlternatingHandValue) {
  // Boxes [1,3], [2,4], [3,4] give deviations -10/9, -10/9, -1; sum 29/9 over N = 4.
  pl::SiteObservables obs{{1, -1, 1, -1}, {1, -1, 1, -1}};
  const auto r = pl::one_block_statistic({obs}, 1);
  EXPECT_NEAR(r.time_averaged, 29.0 / 36, 1e-15);
  EXPECT_NEAR(r.per_snapshot, 29.0 / 36, 1e-15);
}

TEST(OneBlock, RadiusOutOfRangeThrows) {
  pl::SiteObservables obs{{1, 2, 3, 4}, {1, 2, 3, 4}};
  EXPECT_THROW(pl::one_block_statistic({obs}, 4), pl::Error);
  EXPECT_THROW(pl::one_block_statistic({obs}, 0), pl::Error);
}

TEST(OneBlock, AccumulatorMatchesDirect) {
  pl::ReplicaStream rng(3, 0);
  const int n = 40;
  std::vector<pl::SiteObservables> snaps;
  pl::OneBlockAccumulator acc(n, {1, 5, 39});
  for (int k = 0; k < 6; ++k) {
    pl::SiteObservables o;
    for (int x = 0; x < n; ++x) {
      o.a.push_back(rng.uniform() - 0.5);
      o.b.push_back(rng.uniform() - 0.5);
    }
    acc.add(o);
    snaps.push_back(o);
  }
  const auto res = acc.results();
  const int radii[] = {1, 5, 39};
  for (int i = 0; i < 3; ++i) {
    const auto direct = pl::one_block_statistic(snaps, radii[i]);
    EXPECT_NEAR(res[sz(i)].time_averaged, direct.time_averaged, 1e-12);
    EXPECT_NEAR(res[sz(i)].per_snapshot, direct.per_snapshot, 1e-12);
  }
}

TEST(RareEvent, WholeSpaceBallIsExactlyZero) {
  const int n = 16;
  const auto rt = scaled_sine_rates(n, 1.5, 1.0);
  pl::RareEventOptions o;
  o.n = n;
  o.replicas = 100;
  const auto e = pl::rare_event_log_probability(
      rt, {pl::empirical_permuton(pl::Permutation::reverse(n)), std::numeric_limits<double>::infinity()}, o);
  EXPECT_EQ(e.log_probability, 0.0);
  EXPECT_EQ(e.hits, 100u);
}

TEST(RareEvent, IdentityTargetShortTime) {
  const int n = 32;
  const double horizon = 0.05;
  const auto rt = scaled_sine_rates(n, 1.5, 1.0, horizon, horizon);
  pl::RareEventOptions o;
  o.n = n;
  o.horizon = horizon;
  o.replicas = 200;
  const auto e = pl::rare_event_log_probability(rt, {pl::empirical_permuton(pl::Permutation::identity(n)), 0.25}, o);
  EXPECT_GE(e.log_probability, -0.05 * std::pow(n, e.gamma));
  EXPECT_EQ(e.gamma, 1.5);
}

TEST(RareEvent, ZeroHitsReportMinusInfinity) {
  const int n = 16;
  const auto rt = scaled_sine_rates(n, 1.5, 1.0, 0.05, 0.05);
  pl::RareEventOptions o;
  o.n = n;
  o.horizon = 0.05;
  o.replicas = 100;
  const auto e = pl::rare_event_log_probability(rt, {pl::empirical_permuton(pl::Permutation::reverse(n)), 0.01}, o);
  EXPECT_EQ(e.hits, 0u);
  EXPECT_EQ(e.log_probability, -std::numeric_limits<double>::infinity());
}

TEST(RareEvent, RequiresEnoughReplicas) {
  const auto rt = scaled_sine_rates(16, 1.5, 1.0);
  pl::RareEventOptions o;
  o.n = 16;
  o.replicas = 10;
  EXPECT_THROW(pl::rare_event_log_probability(rt, {pl::empirical_permuton(pl::Permutation::identity(16)), 0.1}, o),
               pl::Error);
}
