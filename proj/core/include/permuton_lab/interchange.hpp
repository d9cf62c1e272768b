#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "permuton_lab/core.hpp"
#include "permuton_lab/euler.hpp"
#include "permuton_lab/rng.hpp"

namespace permuton_lab {

/// Particles, sites and colors all take values in {1..N}.  Arrays have
/// length N + 1 with slot 0 unused so indices read as in the formulas.
struct Configuration {
  int n = 0;
  std::vector<int> position;  // position[i]: site of particle i
  std::vector<int> particle;  // particle[x]: particle at site x
  std::vector<int> color;     // color[i]: color of particle i

  /// Particle i at site i; colors[i-1] is the color of particle i (empty: all 1).
  static Configuration identity(int n, std::vector<int> colors);
  /// Uniform permutation and i.i.d. uniform colors.
  static Configuration uniform(int n, ReplicaStream& rng);
  /// Identity placement with i.i.d. uniform colors.
  static Configuration identity_uniform_colors(int n, ReplicaStream& rng);

  int color_at(int x) const { return color[static_cast<std::size_t>(particle[static_cast<std::size_t>(x)])]; }
  /// Swaps the particles at sites x and x + 1.
  void swap_sites(int x);
  /// Throws unless positions and particles are inverse bijections and colors are in range.
  void validate() const;
  /// Permutation i -> position of particle i.
  Permutation positions_as_permutation() const;
};

/// Discrete velocities v(k, x, phi) and color drifts r(k, x, phi) per epoch k.
/// Storage is padded to (N+2) x (N+2) so that x, phi in {0..N+1} are valid and
/// the boundary rows hold zeros.
class RateTable {
 public:
  RateTable(int n, double alpha, double delta, std::size_t epochs);

  int n() const { return n_; }
  double alpha() const { return alpha_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  std::size_t epochs() const { return epochs_; }
  /// Epoch in force at time t; times past the last epoch reuse it.
  std::size_t epoch_at(double t) const;
  /// Start time of epoch k.
  double epoch_start(std::size_t k) const { return static_cast<double>(k) * delta_; }

  double v(std::size_t k, int x, int phi) const { return v_[index(k, x, phi)]; }
  double r(std::size_t k, int x, int phi) const { return r_[index(k, x, phi)]; }
  double& v(std::size_t k, int x, int phi) { return v_[index(k, x, phi)]; }
  double& r(std::size_t k, int x, int phi) { return r_[index(k, x, phi)]; }

  double max_abs_v() const;
  double max_abs_r() const;
  /// max over epochs, edges and colors of v(x+1, phi') - v(x, phi); the
  /// swap rate 1 + eps (v_x - v_{x+1}) stays positive while eps times this is < 1.
  double max_edge_bias() const;
  /// Throws unless every swap and color rate is strictly positive.
  void check_positive() const;

 private:
  std::size_t index(std::size_t k, int x, int phi) const {
    const auto w = static_cast<std::size_t>(n_ + 2);
    return (k * w + static_cast<std::size_t>(x)) * w + static_cast<std::size_t>(phi);
  }

  int n_;
  double alpha_, epsilon_, delta_;
  std::size_t epochs_;
  std::vector<double> v_, r_;
};

using StreamFunction = std::function<double(double t, double x, double phi)>;

/// Rates from f(x, phi) = F(t_k, x/N, phi/(N+1)) (zero for x in {0,1,N,N+1} and
/// phi in {0,N+1}): v = (N/2)(f(x,phi+1) - f(x,phi-1)),
/// r = (N/2)(f(x-1,phi) - f(x+1,phi)).  Time-independent streams get one epoch.
/// Throws if the stream does not vanish at phi in {0, 1}, and (when
/// `require_positive`) if some jump rate would not be positive.
RateTable discrete_rates(const StreamFunction& stream, int n, double alpha, double delta, double horizon,
                         bool time_independent = false, bool require_positive = true);
RateTable discrete_rates(const QuantileField& field, int n, double alpha, double delta, double horizon,
                         bool require_positive = true);

/// Largest residual of the stationarity equations over all epochs, sites and colors.
double verify_stationarity(const RateTable& rates);

enum class EventKind : std::uint8_t { kSwap = 0, kColorUp = 1, kColorDown = 2 };

struct Event {
  double time;
  EventKind kind;
  std::uint32_t site;  // swap: left site x of edge (x, x+1); color: site x
};

struct EventLog {
  int n = 0;
  double alpha = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  Configuration initial;
  std::vector<Event> events;
  /// Color clock rings that hit the color boundary and changed nothing.
  std::uint64_t discarded_color_events = 0;
  std::uint64_t swap_count = 0;
  /// Time the simulation stopped (horizon unless a stop rule fired).
  double end_time = 0.0;

  /// Replays events and checks monotone times and valid configurations.
  void validate() const;
};

/// Receives events as they happen; return false to stop the simulation.
class EventObserver {
 public:
  virtual ~EventObserver() = default;
  virtual void on_start(const Configuration& initial, double t0) { (void)initial, (void)t0; }
  virtual bool on_event(const Event& e) = 0;
  virtual void on_finish(double t) { (void)t; }
};

struct SimulationOptions {
  std::uint64_t replica = 0;
  std::uint64_t max_events = 1'000'000'000ULL;
  /// Keep events in the returned log.
  bool record = true;
  /// Stop right after this many swaps (0 = run to the horizon).  The horizon
  /// is then ignored and the last epoch is reused past it.
  std::uint64_t stop_after_swaps = 0;
  EventObserver* observer = nullptr;
};

/// Each of the N - 1 edges swaps at rate N^alpha / 2; colors stay fixed.
EventLog simulate_unbiased(int n, double alpha, double horizon, std::uint64_t seed,
                           const Configuration* init = nullptr, const SimulationOptions& options = {});

/// Biased interchange: edge (x, x+1) swaps at rate N^alpha/2 (1 + eps(v_x - v_{x+1}));
/// the color at x steps +-1 at rate N^alpha/2 (1 +- eps r_x), a no-op at the
/// color boundary.  `init` defaults to a uniform configuration.
EventLog simulate_biased(const RateTable& rates, double horizon, std::uint64_t seed,
                         const Configuration* init = nullptr, const SimulationOptions& options = {});

/// Rescaled positions x_i/N and colors phi_i/N of every particle.
struct Trajectories {
  PathEnsemble positions;
  PathEnsemble colors;
};
Trajectories trajectories(const EventLog& log);

/// Configurations at the requested times (sorted ascending) by replay.
std::vector<Configuration> snapshots(const EventLog& log, const std::vector<double>& times);

void write_event_log(std::ostream& out, const EventLog& log);
EventLog read_event_log(std::istream& in);
/// CSV rows `time,particle,site,color` at each requested time.
void write_snapshot_csv(std::ostream& out, const EventLog& log, const std::vector<double>& times);

}  // namespace permuton_lab
