#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "permuton_lab/core.hpp"

namespace permuton_lab {

using BigInt = boost::multiprecision::cpp_int;

/// Word of adjacent transpositions s_{letter}, letters in {1..N-1}, applied
/// left to right to the particle positions.
struct TranspositionWord {
  int n = 0;
  std::vector<int> letters;

  void validate() const;
  /// Positions after applying the letters in order, starting from the identity.
  Permutation compose() const;
};

/// binom(N,2)! / prod_{j=1}^{N-1} (2j-1)^{N-j}.
BigInt stanley_count(int n);

/// Number of reduced words of the reverse permutation (N <= 6), by dynamic
/// programming over permutations ordered by inversions.
BigInt enumerate_sorting_networks(int n);

/// Depth-first enumeration of the same words with inversion-increasing
/// pruning; calls `visit` for each complete word and returns the count.
std::uint64_t for_each_sorting_network(int n, const std::function<void(const std::vector<int>&)>& visit);

/// Walk counts over S_N indexed by permutation rank.
class WalkVector {
 public:
  explicit WalkVector(int n);

  int n() const { return n_; }
  std::size_t order() const { return perms_.size(); }
  const std::vector<BigInt>& weights() const { return weights_; }
  const Permutation& permutation(std::size_t rank) const { return perms_[rank]; }
  std::size_t rank(const Permutation& p) const;
  std::size_t steps() const { return steps_; }

  /// One step: every walk extends by each of the N - 1 letters.
  void step();
  BigInt total() const;

 private:
  int n_;
  std::size_t steps_ = 0;
  std::vector<Permutation> perms_;
  std::vector<std::vector<std::size_t>> next_;  // next_[rank][letter-1]
  std::vector<BigInt> weights_;
};

/// W1(mu_sigma, mu_rev) for every sigma in S_N, indexed by WalkVector rank.
std::vector<double> distances_to_reverse(const WalkVector& walks);

/// Number of length-M words whose product lies within W1 distance delta of
/// the reverse permutation (N <= 6).
BigInt relaxed_count_exact(int n, std::size_t m, double delta);

bool is_delta_relaxed(const TranspositionWord& word, double delta);

/// M = floor(N^{1+kappa} (N-1) / 2).
std::uint64_t relaxed_length(int n, double kappa);

enum class LengthMode { kFixed, kPoissonized };

struct RelaxedEstimateOptions {
  int n = 5;
  double kappa = 0.5;
  double delta = 0.1;
  std::size_t replicas = 10000;
  std::uint64_t seed = 1;
  LengthMode mode = LengthMode::kFixed;
  std::size_t threads = 0;
  /// Overrides the length M when nonzero.
  std::uint64_t length = 0;
  /// Scale applied to the sine-curve stream that drives the proposal.
  double field_scale = 1.0;
};

struct RelaxedEstimate {
  double log_count = 0.0;
  double std_error = 0.0;
  std::uint64_t length = 0;
  std::size_t hits = 0;
  /// log P-hat, the importance-sampled walk probability.
  double log_probability = 0.0;
};

/// log |relaxed networks| = M log(N-1) + log P(walk ends within delta of rev),
/// with P estimated by importance sampling under the biased sine dynamics at
/// alpha = 1 + kappa from the identity.
RelaxedEstimate relaxed_count_estimate(const RelaxedEstimateOptions& options);

}  // namespace permuton_lab
