#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "permuton_lab/estimators.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/interchange.hpp"

namespace permuton_lab {

// Named experiments shared by the command-line tool and the acceptance suite.

struct LlnOptions {
  std::vector<int> sizes{64, 128, 256};
  std::string field = "sine";
  double alpha = 1.6;
  double horizon = 1.0;
  double beta = 0.1;
  double delta = 0.05;
  std::size_t replicas = 1;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  /// Time points for the sup-norm path distance.
  std::size_t grid_points = 2048;
  std::size_t ode_steps = 1024;
  std::uint64_t max_events = 1'000'000'000ULL;
};

struct LlnRow {
  int n = 0;
  /// Mean over replicas of the sup-grid path ensemble distance.
  double path_distance = 0.0;
  /// Mean over replicas of W1 between (0, T) position permutons.
  double permuton_distance = 0.0;
  std::uint64_t events = 0;
};

/// Biased simulation against the flow of V^{beta,delta} started in the
/// 1/N-cell below each particle's initial (position, color).
std::vector<LlnRow> lln_experiment(const LlnOptions& options);

/// Smoothed, piecewise-time field used by the LLN experiment.
FieldPtr lln_field(const std::string& name, double beta, double delta, double horizon);

struct OneBlockOptions {
  int n = 1024;
  double alpha = 1.5;
  double horizon = 1.0;
  std::size_t snapshots = 64;
  std::vector<int> radii{1, 32};
  std::uint64_t seed = 1;
  std::uint64_t max_events = 1'000'000'000ULL;
};

struct OneBlockRun {
  std::vector<int> radii;
  std::vector<OneBlockResult> results;
  std::uint64_t events = 0;
};

/// Unbiased simulation from a uniform start with a = b = tilt of the particle
/// at each site for a random lattice tilt; snapshots at k T / S, k = 1..S.
OneBlockRun one_block_experiment(const OneBlockOptions& options);

struct MeanOneOptions {
  int n = 64;
  double alpha = 1.5;
  double horizon = 1.0;
  std::size_t replicas = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  /// Radon-Nikodym check: amplitude applied to the sine stream.
  double field_scale = 0.05;
  /// Martingale check: tilts drawn from j / (N t) with |j| <= tilt_band.
  int tilt_band = 2;
};

struct MeanOneResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  /// (mean - 1) / std_error.
  double z = 0.0;
};

/// Mean of exp(radon_nikodym_log) over biased replicas.
MeanOneResult radon_nikodym_mean_one(const MeanOneOptions& options);
/// Mean of exp(log M_T^S) over unbiased replicas for one random tilt.
MeanOneResult martingale_mean_one(const MeanOneOptions& options);

struct EnergyFormRow {
  int n = 0;
  /// Median over replicas of |log RN / N^gamma + (1/2) int (1/N) sum v^2|.
  double median_abs = 0.0;
  double mean_log_weight = 0.0;
};

/// Energy form of the log-weight under the sine rates, per N.
std::vector<EnergyFormRow> energy_form_experiment(const std::vector<int>& sizes, double alpha,
                                                  std::size_t replicas, std::uint64_t seed,
                                                  std::size_t threads = 0);

struct SineEnergyReport {
  double symmetric = 0.0;  // [-1,1] chart
  double unit = 0.0;       // [0,1] chart
};

/// Process energy of n exact sine-curve paths at the given dyadic depth.
SineEnergyReport sine_process_energy(std::size_t paths, int depth, std::uint64_t seed,
                                     std::size_t threads = 0);

}  // namespace permuton_lab
