#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "permuton_lab/core.hpp"
#include "permuton_lab/interchange.hpp"
#include "permuton_lab/stats.hpp"

namespace permuton_lab {

struct LogWeight {
  double value = 0.0;
  double jump_sum = 0.0;
  double compensator = 0.0;
  /// int_0^t (1/N) sum_x v_x^2 ds along the path.
  double energy_integral = 0.0;
  /// True when the swap intensities did not cancel (v nonzero at site 1 or N).
  bool boundary_violation = false;
};

enum class Reference {
  /// Unbiased swaps with the biased color dynamics: color terms cancel.
  kColoredUnbiased,
  /// Unbiased swaps and symmetric color walks: color terms included.
  kFullyUnbiased,
};

/// Streams events into log dP_reference / dP_biased.  Keeps its own copy of
/// the configuration, so it can be attached as a simulation observer or fed
/// from a stored log.
class RadonNikodymAccumulator : public EventObserver {
 public:
  RadonNikodymAccumulator(const RateTable& rates, Reference reference = Reference::kColoredUnbiased);

  void on_start(const Configuration& initial, double t0) override;
  bool on_event(const Event& e) override;
  void on_finish(double t) override;

  LogWeight weight() const;
  const Configuration& state() const { return state_; }

 private:
  struct SiteTerms {
    double v2;
    double compensator;
  };
  SiteTerms site_terms(int x) const;
  void add_site(int x, double sign);
  void advance_to(double t);
  void recompute_sums();

  const RateTable& rates_;
  Reference reference_;
  Configuration state_;
  double t_ = 0.0;
  std::size_t epoch_ = 0;
  double base_;
  // Running sums that are piecewise constant between events.
  double sum_v2_ = 0.0;
  double compensator_rate_ = 0.0;
  LogWeight w_;
};

LogWeight radon_nikodym_log(const EventLog& log, const RateTable& rates,
                            Reference reference = Reference::kColoredUnbiased);

/// Tilt velocities s_i from the lattice {j / (N t) : |j| <= N - 1}.
class TiltVector {
 public:
  TiltVector(std::vector<double> s, double t);

  static TiltVector zero(int n, double t);
  /// s_i = j_i / (N t) for integers |j_i| <= N - 1.
  static TiltVector from_lattice(const std::vector<int>& j, double t);

  int size() const { return static_cast<int>(s_.size()); }
  double t() const { return t_; }
  /// s_i for 1-based i.
  double operator()(int i) const { return s_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<double>& values() const { return s_; }

 private:
  std::vector<double> s_;
  double t_;
};

/// Streams events into log M_t^S.
class MartingaleAccumulator : public EventObserver {
 public:
  MartingaleAccumulator(const TiltVector& s, double alpha, double stop_time);

  void on_start(const Configuration& initial, double t0) override;
  bool on_event(const Event& e) override;
  void on_finish(double t) override;

  double value() const { return drift_ - compensator_; }

 private:
  double edge_term(int x) const;
  void advance_to(double t);

  const TiltVector& s_;
  double alpha_;
  double stop_;
  double eps_;
  double base_;
  Configuration state_;
  double t_ = 0.0;
  double sum_ = 0.0;  // sum_x (exp(eps (s_x - s_{x+1})) - 1)
  double drift_ = 0.0;
  double compensator_ = 0.0;
};

/// log M_t^S = eps sum_i s_i (x_i(t) - x_i(0)) - N^alpha/2 int_0^t sum_x (e^{eps(s_x - s_{x+1})} - 1) ds.
double exponential_martingale_log(const EventLog& log, const TiltVector& s, double t);

/// s_i = (sigma(i) - i) / (t N).
TiltVector optimal_tilt(const Permutation& sigma, double t);

/// I_S(sigma) = (1/N) sum s_i (sigma(i) - i)/N - (t/2)(1/N) sum s_i^2.
double tilt_exponent(const TiltVector& s, const Permutation& sigma);

/// I(sigma) / t.
double one_slice_upper_rate(const Permutation& sigma, double t);

/// Per-site observables (a_x, b_x) at one time, sites 1..N at indices 0..N-1.
struct SiteObservables {
  std::vector<double> a;
  std::vector<double> b;
};

struct OneBlockResult {
  /// (1/N) sum_x |psi(x) * time-average of (h_x - E_prod h_x)|.
  double time_averaged = 0.0;
  /// Same with the absolute value taken per snapshot before averaging.
  double per_snapshot = 0.0;
};

/// One-block statistic with h_x = a_x b_{x-1} and E_prod h_x = (box mean of
/// a)(box mean of b) over the truncated box [x - l, x + l]; site 1 has no h.
OneBlockResult one_block_statistic(const std::vector<SiteObservables>& snapshots, int l,
                                   const std::function<double(int)>& psi = nullptr);

/// Incremental one-block statistic fed configurations one at a time.
class OneBlockAccumulator {
 public:
  OneBlockAccumulator(int n, std::vector<int> radii);
  void add(const SiteObservables& snapshot);
  std::vector<OneBlockResult> results() const;

 private:
  int n_;
  std::vector<int> radii_;
  std::size_t count_ = 0;
  std::vector<std::vector<double>> sum_;      // per radius, per site
  std::vector<double> abs_sum_;               // per radius
};

/// Ball around a target permuton in W1 between the (0, T) position marginal
/// (points (x_i(0)/N, x_i(T)/N)) and the target.  radius = inf is the whole space.
struct PermutonBall {
  Permuton2D target;
  double radius;
};

struct RareEventOptions {
  int n = 64;
  double alpha = 1.5;
  double horizon = 1.0;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  /// Start particles at the identity (else uniform).
  bool identity_start = true;
  std::uint64_t max_events = 1'000'000'000ULL;
};

struct RareEventEstimate {
  double log_probability = 0.0;
  double std_error_log = 0.0;
  std::size_t hits = 0;
  std::size_t replicas = 0;
  double gamma = 0.0;
  /// -log_probability / N^gamma.
  double rate = 0.0;
};

/// Importance sampling of P(W1(mu_{0,T}, target) <= radius) under the
/// unbiased process with the biased process of `rates` as proposal.
RareEventEstimate rare_event_log_probability(const RateTable& rates, const PermutonBall& ball,
                                             const RareEventOptions& options);

}  // namespace permuton_lab
