#include "permuton_lab/interchange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace permuton_lab {

namespace {

constexpr std::size_t sz(int i) { return static_cast<std::size_t>(i); }

// Sum tree over edge rates.  Parents are recomputed from their children on
// every update, so sums never drift however many updates are applied.
class RateTree {
 public:
  explicit RateTree(std::size_t n) {
    cap_ = 1;
    while (cap_ < std::max<std::size_t>(n, 1)) cap_ <<= 1;
    tree_.assign(2 * cap_, 0.0);
  }
  void set(std::size_t i, double w) {
    std::size_t p = cap_ + i;
    tree_[p] = w;
    for (p >>= 1; p >= 1; p >>= 1) tree_[p] = tree_[2 * p] + tree_[2 * p + 1];
  }
  double total() const { return tree_[1]; }
  /// Leaf whose cumulative interval contains u, for u in [0, total).
  std::size_t find(double u) const {
    std::size_t p = 1;
    while (p < cap_) {
      const double left = tree_[2 * p];
      if (u < left || tree_[2 * p + 1] <= 0.0) {
        p = 2 * p;
      } else {
        u -= left;
        p = 2 * p + 1;
      }
    }
    return p - cap_;
  }

 private:
  std::size_t cap_;
  std::vector<double> tree_;
};

}  // namespace

Configuration Configuration::identity(int n, std::vector<int> colors) {
  if (n < 1) throw Error("configuration needs N >= 1");
  Configuration c;
  c.n = n;
  c.position.resize(sz(n) + 1);
  c.particle.resize(sz(n) + 1);
  for (int i = 0; i <= n; ++i) c.position[sz(i)] = c.particle[sz(i)] = i;
  if (colors.empty()) colors.assign(sz(n), 1);
  if (colors.size() != sz(n)) throw Error("colors must have N entries");
  c.color.assign(1, 0);
  c.color.insert(c.color.end(), colors.begin(), colors.end());
  c.validate();
  return c;
}

Configuration Configuration::identity_uniform_colors(int n, ReplicaStream& rng) {
  std::vector<int> colors(sz(n));
  for (int& c : colors) c = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  return identity(n, std::move(colors));
}

Configuration Configuration::uniform(int n, ReplicaStream& rng) {
  Configuration c = identity_uniform_colors(n, rng);
  for (int x = n; x >= 2; --x) {
    const int y = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(x)));
    std::swap(c.particle[sz(x)], c.particle[sz(y)]);
  }
  for (int x = 1; x <= n; ++x) c.position[sz(c.particle[sz(x)])] = x;
  return c;
}

void Configuration::swap_sites(int x) {
  const int p = particle[sz(x)], q = particle[sz(x + 1)];
  particle[sz(x)] = q;
  particle[sz(x + 1)] = p;
  position[sz(p)] = x + 1;
  position[sz(q)] = x;
}

void Configuration::validate() const {
  if (position.size() != sz(n) + 1 || particle.size() != sz(n) + 1 || color.size() != sz(n) + 1)
    throw Error("configuration arrays have the wrong length");
  for (int i = 1; i <= n; ++i) {
    const int x = position[sz(i)];
    if (x < 1 || x > n || particle[sz(x)] != i) throw Error("positions and particles are not inverse bijections");
    if (color[sz(i)] < 1 || color[sz(i)] > n) throw Error("color out of range");
  }
}

Permutation Configuration::positions_as_permutation() const {
  return Permutation(std::vector<int>(position.begin() + 1, position.end()));
}

RateTable::RateTable(int n, double alpha, double delta, std::size_t epochs)
    : n_(n), alpha_(alpha), epsilon_(std::pow(static_cast<double>(n), 1.0 - alpha)), delta_(delta),
      epochs_(epochs) {
  if (n < 2) throw Error("rate table needs N >= 2");
  if (epochs == 0) throw Error("rate table needs at least one epoch");
  const std::size_t w = sz(n) + 2;
  v_.assign(epochs * w * w, 0.0);
  r_.assign(epochs * w * w, 0.0);
}

std::size_t RateTable::epoch_at(double t) const {
  if (epochs_ == 1) return 0;
  return time_cell(t, delta_, epochs_);
}

double RateTable::max_abs_v() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double RateTable::max_abs_r() const {
  double m = 0.0;
  for (double x : r_) m = std::max(m, std::abs(x));
  return m;
}

double RateTable::max_edge_bias() const {
  double bias = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < epochs_; ++k)
    for (int x = 1; x < n_; ++x) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int phi = 1; phi <= n_; ++phi) {
        lo = std::min(lo, v(k, x, phi));
        hi = std::max(hi, v(k, x + 1, phi));
      }
      bias = std::max(bias, hi - lo);
    }
  return bias;
}

void RateTable::check_positive() const {
  if (!(epsilon_ * max_edge_bias() < 1.0)) throw Error("swap rates not positive: eps * max edge bias >= 1");
  if (!(epsilon_ * max_abs_r() < 1.0)) throw Error("color rates not positive: eps * max |r| >= 1");
}

RateTable discrete_rates(const StreamFunction& stream, int n, double alpha, double delta, double horizon,
                         bool time_independent, bool require_positive) {
  if (n < 2) throw Error("discrete rates need N >= 2");
  if (!(delta > 0.0)) throw Error("epoch length must be positive");
  if (!(horizon > 0.0)) throw Error("horizon must be positive");
  const std::size_t epochs =
      time_independent ? 1 : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(horizon / delta * (1.0 + 1e-12))));
  RateTable rt(n, alpha, delta, epochs);
  const double nd = n;
  const std::size_t w = sz(n) + 2;
  std::vector<double> f(w * w);
  for (std::size_t k = 0; k < epochs; ++k) {
    const double t = rt.epoch_start(k);
    for (int x = 1; x <= n; ++x)
      for (double phi : {0.0, 1.0})
        if (std::abs(stream(t, x / nd, phi)) > 1e-8)
          throw Error("stream function does not vanish at color 0 or 1");
    std::fill(f.begin(), f.end(), 0.0);
    for (int x = 2; x <= n - 1; ++x)
      for (int phi = 1; phi <= n; ++phi) f[sz(x) * w + sz(phi)] = stream(t, x / nd, phi / (nd + 1.0));
    auto F = [&](int x, int phi) { return f[sz(x) * w + sz(phi)]; };
    for (int x = 1; x <= n; ++x)
      for (int phi = 1; phi <= n; ++phi) {
        rt.v(k, x, phi) = 0.5 * nd * (F(x, phi + 1) - F(x, phi - 1));
        rt.r(k, x, phi) = 0.5 * nd * (F(x - 1, phi) - F(x + 1, phi));
      }
  }
  if (require_positive) rt.check_positive();
  return rt;
}

RateTable discrete_rates(const QuantileField& field, int n, double alpha, double delta, double horizon,
                         bool require_positive) {
  if (field.chart() != Chart::kUnit) throw Error("discrete rates need a [0,1] field");
  return discrete_rates([&](double t, double x, double phi) { return field.stream(t, x, phi); }, n, alpha, delta,
                        horizon, field.time_independent(), require_positive);
}

double verify_stationarity(const RateTable& rt) {
  const int n = rt.n();
  double worst = 0.0;
  for (std::size_t k = 0; k < rt.epochs(); ++k)
    for (int phi = 1; phi <= n; ++phi) {
      auto v = [&](int x) { return rt.v(k, x, phi); };
      auto r = [&](int x, int p) { return rt.r(k, x, p); };
      worst = std::max(worst, std::abs(v(1) + v(2) - (r(1, phi - 1) - r(1, phi + 1))));
      for (int x = 2; x <= n - 1; ++x)
        worst = std::max(worst, std::abs(v(x + 1) - v(x - 1) - (r(x, phi - 1) - r(x, phi + 1))));
      worst = std::max(worst, std::abs(v(n - 1) + v(n) - (r(n, phi + 1) - r(n, phi - 1))));
    }
  return worst;
}

void EventLog::validate() const {
  Configuration c = initial;
  c.validate();
  double prev = -std::numeric_limits<double>::infinity();
  for (const Event& e : events) {
    if (!(e.time > prev)) throw Error("event times are not strictly increasing");
    prev = e.time;
    const int x = static_cast<int>(e.site);
    switch (e.kind) {
      case EventKind::kSwap:
        if (x < 1 || x >= n) throw Error("swap edge out of range");
        c.swap_sites(x);
        break;
      case EventKind::kColorUp:
      case EventKind::kColorDown: {
        if (x < 1 || x > n) throw Error("color event site out of range");
        int& col = c.color[sz(c.particle[sz(x)])];
        col += e.kind == EventKind::kColorUp ? 1 : -1;
        break;
      }
    }
    c.validate();
  }
}

namespace {

EventLog start_log(int n, double alpha, double horizon, std::uint64_t seed, const Configuration& init) {
  EventLog log;
  log.n = n;
  log.alpha = alpha;
  log.horizon = horizon;
  log.seed = seed;
  log.initial = init;
  return log;
}

// Shared bookkeeping for an event that happened: log it, notify the observer,
// apply the stop rule and the event budget.  Returns false to stop.
bool emit(EventLog& log, const SimulationOptions& opt, const Event& e, std::uint64_t& fired) {
  if (++fired > opt.max_events) throw Error("simulation exceeded --max-events");
  if (e.kind == EventKind::kSwap) ++log.swap_count;
  if (opt.record) log.events.push_back(e);
  bool go = opt.observer ? opt.observer->on_event(e) : true;
  if (opt.stop_after_swaps > 0 && log.swap_count >= opt.stop_after_swaps) go = false;
  return go;
}

}  // namespace

EventLog simulate_unbiased(int n, double alpha, double horizon, std::uint64_t seed, const Configuration* init,
                           const SimulationOptions& opt) {
  if (n < 2) throw Error("simulation needs N >= 2");
  if (!(horizon > 0.0) && opt.stop_after_swaps == 0) throw Error("horizon must be positive");
  ReplicaStream rng(seed, opt.replica);
  Configuration c = init ? *init : Configuration::uniform(n, rng);
  if (c.n != n) throw Error("initial configuration has the wrong size");
  EventLog log = start_log(n, alpha, horizon, seed, c);
  if (opt.observer) opt.observer->on_start(c, 0.0);
  const double total = static_cast<double>(n - 1) * 0.5 * std::pow(static_cast<double>(n), alpha);
  const double end = opt.stop_after_swaps > 0 ? std::numeric_limits<double>::infinity() : horizon;
  double t = 0.0;
  std::uint64_t fired = 0;
  while (true) {
    const double dt = rng.exponential(total);
    if (t + dt >= end) {
      t = end;
      break;
    }
    t += dt;
    const int x = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    c.swap_sites(x);
    if (!emit(log, opt, {t, EventKind::kSwap, static_cast<std::uint32_t>(x)}, fired)) break;
  }
  log.end_time = t;
  if (opt.observer) opt.observer->on_finish(t);
  return log;
}

EventLog simulate_biased(const RateTable& rt, double horizon, std::uint64_t seed, const Configuration* init,
                         const SimulationOptions& opt) {
  const int n = rt.n();
  if (!(horizon > 0.0) && opt.stop_after_swaps == 0) throw Error("horizon must be positive");
  rt.check_positive();
  ReplicaStream rng(seed, opt.replica);
  Configuration c = init ? *init : Configuration::uniform(n, rng);
  if (c.n != n) throw Error("initial configuration has the wrong size");
  EventLog log = start_log(n, rt.alpha(), horizon, seed, c);
  if (opt.observer) opt.observer->on_start(c, 0.0);

  const double na = std::pow(static_cast<double>(n), rt.alpha());
  const double base = 0.5 * na;
  const double eps = rt.epsilon();
  const double color_total = static_cast<double>(n) * na;
  const double end = opt.stop_after_swaps > 0 ? std::numeric_limits<double>::infinity() : horizon;

  std::size_t k = 0;
  RateTree tree(sz(n - 1));
  auto edge_rate = [&](int x) {
    return base * (1.0 + eps * (rt.v(k, x, c.color_at(x)) - rt.v(k, x + 1, c.color_at(x + 1))));
  };
  auto refresh = [&](int x) {
    if (x >= 1 && x <= n - 1) tree.set(sz(x - 1), edge_rate(x));
  };
  auto rebuild = [&] {
    for (int x = 1; x <= n - 1; ++x) refresh(x);
  };
  rebuild();

  double t = 0.0;
  std::uint64_t fired = 0;
  while (true) {
    const double total = tree.total() + color_total;
    const double dt = rng.exponential(total);
    const double next_epoch = k + 1 < rt.epochs() ? rt.epoch_start(k + 1) : std::numeric_limits<double>::infinity();
    if (t + dt >= std::min(next_epoch, end)) {
      if (end <= next_epoch) {
        t = end;
        break;
      }
      // Memorylessness: restart all clocks under the next epoch's rates.
      t = next_epoch;
      ++k;
      rebuild();
      continue;
    }
    t += dt;
    const double u = rng.uniform() * total;
    Event e{t, EventKind::kSwap, 0};
    if (u < color_total) {
      const int x = std::min(n, 1 + static_cast<int>(u / na));
      const double up_prob = 0.5 * (1.0 + eps * rt.r(k, x, c.color_at(x)));
      const bool up = rng.uniform() < up_prob;
      int& col = c.color[sz(c.particle[sz(x)])];
      if ((up && col == n) || (!up && col == 1)) {
        ++log.discarded_color_events;
        if (++fired > opt.max_events) throw Error("simulation exceeded --max-events");
        continue;
      }
      col += up ? 1 : -1;
      refresh(x - 1);
      refresh(x);
      e = {t, up ? EventKind::kColorUp : EventKind::kColorDown, static_cast<std::uint32_t>(x)};
    } else {
      const int x = 1 + static_cast<int>(tree.find(u - color_total));
      c.swap_sites(x);
      refresh(x - 1);
      refresh(x);
      refresh(x + 1);
      e = {t, EventKind::kSwap, static_cast<std::uint32_t>(x)};
    }
    if (!emit(log, opt, e, fired)) break;
  }
  log.end_time = t;
  if (opt.observer) opt.observer->on_finish(t);
  return log;
}

Trajectories trajectories(const EventLog& log) {
  const int n = log.n;
  const double nd = n;
  const double end = log.end_time > 0.0 ? log.end_time : log.horizon;
  Configuration c = log.initial;
  std::vector<std::vector<SteppedPath::Jump>> pj(sz(n) + 1), cj(sz(n) + 1);
  for (const Event& e : log.events) {
    const int x = static_cast<int>(e.site);
    if (e.kind == EventKind::kSwap) {
      c.swap_sites(x);
      for (int s : {x, x + 1}) {
        const int p = c.particle[sz(s)];
        pj[sz(p)].push_back({e.time, s / nd});
      }
    } else {
      const int p = c.particle[sz(x)];
      c.color[sz(p)] += e.kind == EventKind::kColorUp ? 1 : -1;
      cj[sz(p)].push_back({e.time, c.color[sz(p)] / nd});
    }
  }
  std::vector<SteppedPath> pos, col;
  pos.reserve(sz(n));
  col.reserve(sz(n));
  for (int i = 1; i <= n; ++i) {
    pos.push_back(SteppedPath::stepped(0.0, end, log.initial.position[sz(i)] / nd, std::move(pj[sz(i)])));
    col.push_back(SteppedPath::stepped(0.0, end, log.initial.color[sz(i)] / nd, std::move(cj[sz(i)])));
  }
  return {PathEnsemble(std::move(pos)), PathEnsemble(std::move(col))};
}

std::vector<Configuration> snapshots(const EventLog& log, const std::vector<double>& times) {
  if (!std::is_sorted(times.begin(), times.end())) throw Error("snapshot times must be sorted");
  std::vector<Configuration> out;
  out.reserve(times.size());
  Configuration c = log.initial;
  std::size_t next = 0;
  for (double t : times) {
    while (next < log.events.size() && log.events[next].time <= t) {
      const Event& e = log.events[next++];
      const int x = static_cast<int>(e.site);
      if (e.kind == EventKind::kSwap) {
        c.swap_sites(x);
      } else {
        c.color[sz(c.particle[sz(x)])] += e.kind == EventKind::kColorUp ? 1 : -1;
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace permuton_lab
