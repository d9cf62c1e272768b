#include "permuton_lab/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "permuton_lab/parallel.hpp"
#include "permuton_lab/stats.hpp"
#include "permuton_lab/transport.hpp"

namespace permuton_lab {

namespace {

constexpr std::size_t sz(int i) { return static_cast<std::size_t>(i); }

// Salt separating initial-condition streams from dynamics streams.
std::uint64_t init_key(std::uint64_t seed) { return mix64(seed) ^ 0x9e3779b97f4a7c15ULL; }

}  // namespace

FieldPtr lln_field(const std::string& name, double beta, double delta, double horizon) {
  return piecewise_time(smooth_boundary(make_field(name), beta), delta, horizon);
}

std::vector<LlnRow> lln_experiment(const LlnOptions& opt) {
  if (opt.sizes.empty()) throw Error("LLN experiment needs at least one N");
  if (opt.replicas == 0) throw Error("LLN experiment needs at least one replica");
  const FieldPtr field = lln_field(opt.field, opt.beta, opt.delta, opt.horizon);
  const Partition grid = Partition::uniform(0.0, opt.horizon, std::max<std::size_t>(opt.grid_points, 2) - 1);
  std::vector<LlnRow> rows;
  for (int n : opt.sizes) {
    const RateTable rates = discrete_rates(*field, n, opt.alpha, opt.delta, opt.horizon);
    std::vector<double> path_d(opt.replicas), perm_d(opt.replicas);
    std::vector<std::uint64_t> events(opt.replicas);
    parallel_for(opt.replicas, resolve_threads(opt.threads), [&](std::size_t r) {
      const std::uint64_t replica = (static_cast<std::uint64_t>(n) << 32) | r;
      ReplicaStream init_rng(init_key(opt.seed), replica);
      const Configuration init = Configuration::uniform(n, init_rng);
      SimulationOptions so;
      so.replica = replica;
      so.max_events = opt.max_events;
      const EventLog log = simulate_biased(rates, opt.horizon, opt.seed, &init, so);
      events[r] = log.events.size() + log.discarded_color_events;
      const Trajectories tr = trajectories(log);

      // Flow particles seeded uniformly in the cell below each particle's start.
      const double nd = n;
      std::vector<SteppedPath> flow;
      flow.reserve(sz(n));
      std::vector<Permuton2D::Point> particle_pts(sz(n)), flow_pts(sz(n));
      for (int i = 1; i <= n; ++i) {
        const double x0 = (init.position[sz(i)] - init_rng.uniform()) / nd;
        const double p0 = (init.color[sz(i)] - init_rng.uniform()) / nd;
        const ColoredPath cp = integrate_colored(*field, {x0, p0}, grid, IntegratorOptions{opt.ode_steps});
        std::vector<double> xs(cp.states.size());
        for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = cp.states[k].x;
        flow_pts[sz(i - 1)] = {xs.front(), xs.back()};
        flow.push_back(SteppedPath::sampled(cp.times, std::move(xs)));
        const SteppedPath& p = tr.positions.paths()[sz(i - 1)];
        particle_pts[sz(i - 1)] = {p(0.0), p(opt.horizon)};
      }
      path_d[r] = path_ensemble_distance(tr.positions, PathEnsemble(std::move(flow)), grid);
      perm_d[r] = wasserstein_points(Permuton2D::from_points(std::move(particle_pts)),
                                     Permuton2D::from_points(std::move(flow_pts)));
    });
    LlnRow row;
    row.n = n;
    row.path_distance = pairwise_sum(path_d) / static_cast<double>(opt.replicas);
    row.permuton_distance = pairwise_sum(perm_d) / static_cast<double>(opt.replicas);
    for (auto e : events) row.events += e;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Replays swaps and records the tilt of the particle on each site at fixed times.
class TiltSnapshotObserver : public EventObserver {
 public:
  TiltSnapshotObserver(const TiltVector& s, std::vector<double> times, OneBlockAccumulator& acc)
      : s_(s), times_(std::move(times)), acc_(acc) {}

  void on_start(const Configuration& initial, double) override { state_ = initial; }
  bool on_event(const Event& e) override {
    flush(e.time);
    if (e.kind == EventKind::kSwap) state_.swap_sites(static_cast<int>(e.site));
    return true;
  }
  void on_finish(double t) override {
    while (next_ < times_.size() && times_[next_] <= t) record();
  }

 private:
  // Snapshot times strictly before the event see the pre-event state.
  void flush(double t) {
    while (next_ < times_.size() && times_[next_] < t) record();
  }
  void record() {
    SiteObservables obs;
    obs.a.resize(sz(state_.n));
    for (int x = 1; x <= state_.n; ++x) obs.a[sz(x - 1)] = s_(state_.particle[sz(x)]);
    obs.b = obs.a;
    acc_.add(obs);
    ++next_;
  }

  const TiltVector& s_;
  std::vector<double> times_;
  OneBlockAccumulator& acc_;
  Configuration state_;
  std::size_t next_ = 0;
};

}  // namespace

OneBlockRun one_block_experiment(const OneBlockOptions& opt) {
  if (opt.snapshots == 0) throw Error("one-block experiment needs snapshots");
  ReplicaStream rng(init_key(opt.seed), 0);
  std::vector<int> j(sz(opt.n));
  for (int& v : j) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * opt.n - 1))) - (opt.n - 1);
  const TiltVector tilt = TiltVector::from_lattice(j, opt.horizon);
  const Configuration init = Configuration::uniform(opt.n, rng);
  std::vector<double> times(opt.snapshots);
  for (std::size_t k = 0; k < opt.snapshots; ++k)
    times[k] = opt.horizon * static_cast<double>(k + 1) / static_cast<double>(opt.snapshots);
  OneBlockAccumulator acc(opt.n, opt.radii);
  TiltSnapshotObserver obs(tilt, times, acc);
  SimulationOptions so;
  so.record = false;
  so.observer = &obs;
  so.max_events = opt.max_events;
  const EventLog log = simulate_unbiased(opt.n, opt.alpha, opt.horizon, opt.seed, &init, so);
  OneBlockRun run;
  run.radii = opt.radii;
  run.results = acc.results();
  run.events = log.swap_count;
  return run;
}

namespace {

MeanOneResult summarize_exp(const std::vector<double>& log_w) {
  std::vector<double> w(log_w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w[i]);
  const MeanEstimate m = mean_and_stderr(w);
  MeanOneResult out;
  out.mean = m.mean;
  out.std_error = m.std_error;
  out.replicas = m.n;
  out.z = m.std_error > 0.0 ? (m.mean - 1.0) / m.std_error : (m.mean == 1.0 ? 0.0 : INFINITY);
  return out;
}

}  // namespace

MeanOneResult radon_nikodym_mean_one(const MeanOneOptions& opt) {
  const FieldPtr sine = sine_field();
  const double scale = opt.field_scale;
  const RateTable rates = discrete_rates(
      [&](double t, double x, double phi) { return scale * sine->stream(t, x, phi); }, opt.n, opt.alpha, opt.horizon,
      opt.horizon, true);
  std::vector<double> log_w(opt.replicas);
  parallel_for(opt.replicas, resolve_threads(opt.threads), [&](std::size_t r) {
    RadonNikodymAccumulator acc(rates);
    SimulationOptions so;
    so.replica = r;
    so.record = false;
    so.observer = &acc;
    simulate_biased(rates, opt.horizon, opt.seed, nullptr, so);
    log_w[r] = acc.weight().value;
  });
  return summarize_exp(log_w);
}

MeanOneResult martingale_mean_one(const MeanOneOptions& opt) {
  ReplicaStream rng(init_key(opt.seed), 0);
  std::vector<int> j(sz(opt.n));
  for (int& v : j) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * opt.tilt_band + 1))) - opt.tilt_band;
  const TiltVector tilt = TiltVector::from_lattice(j, opt.horizon);
  std::vector<double> log_m(opt.replicas);
  parallel_for(opt.replicas, resolve_threads(opt.threads), [&](std::size_t r) {
    MartingaleAccumulator acc(tilt, opt.alpha, opt.horizon);
    SimulationOptions so;
    so.replica = r;
    so.record = false;
    so.observer = &acc;
    simulate_unbiased(opt.n, opt.alpha, opt.horizon, opt.seed, nullptr, so);
    log_m[r] = acc.value();
  });
  return summarize_exp(log_m);
}

std::vector<EnergyFormRow> energy_form_experiment(const std::vector<int>& sizes, double alpha,
                                                  std::size_t replicas, std::uint64_t seed,
                                                  std::size_t threads) {
  const FieldPtr sine = sine_field();
  std::vector<EnergyFormRow> rows;
  for (int n : sizes) {
    const RateTable rates = discrete_rates(*sine, n, alpha, 1.0, 1.0);
    const double ngamma = std::pow(static_cast<double>(n), 3.0 - alpha);
    std::vector<double> stat(replicas), lw(replicas);
    parallel_for(replicas, resolve_threads(threads), [&](std::size_t r) {
      RadonNikodymAccumulator acc(rates);
      SimulationOptions so;
      so.replica = (static_cast<std::uint64_t>(n) << 32) | r;
      so.record = false;
      so.observer = &acc;
      simulate_biased(rates, 1.0, seed, nullptr, so);
      const LogWeight w = acc.weight();
      stat[r] = std::abs(w.value / ngamma + 0.5 * w.energy_integral);
      lw[r] = w.value;
    });
    rows.push_back({n, median(stat), pairwise_sum(lw) / static_cast<double>(replicas)});
  }
  return rows;
}

SineEnergyReport sine_process_energy(std::size_t paths, int depth, std::uint64_t seed, std::size_t threads) {
  if (paths == 0) throw Error("need at least one path");
  const Partition part = Partition::dyadic(0.0, 1.0, depth);
  std::vector<double> es(paths), eu(paths);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (paths + kChunk - 1) / kChunk;
  parallel_for(chunks, resolve_threads(threads), [&](std::size_t c) {
    ReplicaStream rng(seed, c);
    for (std::size_t i = c * kChunk; i < std::min(paths, (c + 1) * kChunk); ++i) {
      const Point2 p = archimedean_sample(rng);
      const SteppedPath path = sine_process_path(p.x, p.y, part);
      es[i] = path_energy(path, part);
      eu[i] = path_energy(path.affine(0.5, 0.5, Chart::kUnit), part);
    }
  });
  return {pairwise_sum(es) / static_cast<double>(paths), pairwise_sum(eu) / static_cast<double>(paths)};
}

}  // namespace permuton_lab
