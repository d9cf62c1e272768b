#pragma once

#include <cstdint>
#include <random>

namespace permuton_lab {

/// SplitMix64 finalizer; used to derive independent stream keys.
std::uint64_t mix64(std::uint64_t x);

/// Random stream for one replica.  The state is a pure function of
/// (seed, replica), so replica sets are reproducible no matter how they are
/// scheduled across threads.
class ReplicaStream {
 public:
  using result_type = std::uint64_t;

  ReplicaStream(std::uint64_t seed, std::uint64_t replica);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Uniform on [0, 1).
  double uniform();
  /// Exponential with the given rate (rate > 0).
  double exponential(double rate);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace permuton_lab
