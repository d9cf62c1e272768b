#include "permuton_lab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "permuton_lab/parallel.hpp"
#include "permuton_lab/transport.hpp"

namespace permuton_lab {

namespace {

constexpr std::size_t sz(int i) { return static_cast<std::size_t>(i); }

}  // namespace

// ---------------------------------------------------------------------------
// Radon-Nikodym weight

RadonNikodymAccumulator::RadonNikodymAccumulator(const RateTable& rates, Reference reference)
    : rates_(rates), reference_(reference),
      base_(0.5 * std::pow(static_cast<double>(rates.n()), rates.alpha())) {
  for (std::size_t k = 0; k < rates.epochs(); ++k)
    for (int phi = 1; phi <= rates.n(); ++phi)
      if (rates.v(k, 1, phi) != 0.0 || rates.v(k, rates.n(), phi) != 0.0) w_.boundary_violation = true;
}

void RadonNikodymAccumulator::on_start(const Configuration& initial, double t0) {
  state_ = initial;
  t_ = t0;
  epoch_ = rates_.epoch_at(t0);
  w_ = LogWeight{.boundary_violation = w_.boundary_violation};
  recompute_sums();
}

RadonNikodymAccumulator::SiteTerms RadonNikodymAccumulator::site_terms(int x) const {
  const int n = rates_.n();
  const double eps = rates_.epsilon();
  const int phi = state_.color_at(x);
  const double v = rates_.v(epoch_, x, phi);
  SiteTerms out{v * v, 0.0};
  // Reference minus biased total intensity.  Swap rates telescope to
  // -base eps (v_1 - v_N).
  if (x == 1) out.compensator -= base_ * eps * v;
  if (x == n) out.compensator += base_ * eps * v;
  if (reference_ == Reference::kFullyUnbiased) {
    // At a color boundary only one direction changes the state.
    const double r = rates_.r(epoch_, x, phi);
    if (phi == 1) out.compensator -= base_ * eps * r;
    if (phi == n) out.compensator += base_ * eps * r;
  }
  return out;
}

void RadonNikodymAccumulator::add_site(int x, double sign) {
  const SiteTerms s = site_terms(x);
  sum_v2_ += sign * s.v2;
  compensator_rate_ += sign * s.compensator;
}

void RadonNikodymAccumulator::recompute_sums() {
  sum_v2_ = 0.0;
  compensator_rate_ = 0.0;
  for (int x = 1; x <= rates_.n(); ++x) add_site(x, 1.0);
}

void RadonNikodymAccumulator::advance_to(double t) {
  while (true) {
    const double next = epoch_ + 1 < rates_.epochs() ? rates_.epoch_start(epoch_ + 1)
                                                     : std::numeric_limits<double>::infinity();
    const double stop = std::min(t, next);
    if (stop > t_) {
      w_.compensator += compensator_rate_ * (stop - t_);
      w_.energy_integral += sum_v2_ / static_cast<double>(rates_.n()) * (stop - t_);
      t_ = stop;
    }
    if (next > t) break;
    ++epoch_;
    recompute_sums();
  }
}

bool RadonNikodymAccumulator::on_event(const Event& e) {
  advance_to(e.time);
  const double eps = rates_.epsilon();
  const int x = static_cast<int>(e.site);
  if (e.kind == EventKind::kSwap) {
    const double dv = rates_.v(epoch_, x, state_.color_at(x)) - rates_.v(epoch_, x + 1, state_.color_at(x + 1));
    w_.jump_sum -= std::log1p(eps * dv);
    add_site(x, -1.0);
    add_site(x + 1, -1.0);
    state_.swap_sites(x);
    add_site(x, 1.0);
    add_site(x + 1, 1.0);
  } else {
    const bool up = e.kind == EventKind::kColorUp;
    if (reference_ == Reference::kFullyUnbiased) {
      const double r = rates_.r(epoch_, x, state_.color_at(x));
      w_.jump_sum -= std::log1p(up ? eps * r : -eps * r);
    }
    add_site(x, -1.0);
    state_.color[sz(state_.particle[sz(x)])] += up ? 1 : -1;
    add_site(x, 1.0);
  }
  return true;
}

void RadonNikodymAccumulator::on_finish(double t) { advance_to(t); }

LogWeight RadonNikodymAccumulator::weight() const {
  LogWeight w = w_;
  w.value = w.jump_sum - w.compensator;
  return w;
}

LogWeight radon_nikodym_log(const EventLog& log, const RateTable& rates, Reference reference) {
  if (log.n != rates.n() || log.alpha != rates.alpha()) throw Error("event log and rate table disagree on N or alpha");
  RadonNikodymAccumulator acc(rates, reference);
  acc.on_start(log.initial, 0.0);
  for (const Event& e : log.events) acc.on_event(e);
  acc.on_finish(log.end_time > 0.0 ? log.end_time : log.horizon);
  return acc.weight();
}

// ---------------------------------------------------------------------------
// Exponential martingale

TiltVector::TiltVector(std::vector<double> s, double t) : s_(std::move(s)), t_(t) {
  if (!(t > 0.0)) throw Error("tilt time must be positive");
  const double n = static_cast<double>(s_.size());
  for (double v : s_) {
    const double j = v * n * t;
    if (std::abs(j - std::round(j)) > 1e-9 || std::abs(std::round(j)) > n - 1.0)
      throw Error("tilt entry is not on the admissible lattice");
  }
}

TiltVector TiltVector::zero(int n, double t) { return TiltVector(std::vector<double>(sz(n), 0.0), t); }

TiltVector TiltVector::from_lattice(const std::vector<int>& j, double t) {
  const double n = static_cast<double>(j.size());
  std::vector<double> s(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) s[i] = j[i] / (n * t);
  return TiltVector(std::move(s), t);
}

MartingaleAccumulator::MartingaleAccumulator(const TiltVector& s, double alpha, double stop_time)
    : s_(s), alpha_(alpha), stop_(stop_time) {
  const double n = s.size();
  eps_ = std::pow(n, 1.0 - alpha);
  base_ = 0.5 * std::pow(n, alpha);
}

double MartingaleAccumulator::edge_term(int x) const {
  return std::expm1(eps_ * (s_(state_.particle[sz(x)]) - s_(state_.particle[sz(x + 1)])));
}

void MartingaleAccumulator::on_start(const Configuration& initial, double t0) {
  if (initial.n != s_.size()) throw Error("tilt vector and configuration sizes differ");
  state_ = initial;
  t_ = t0;
  drift_ = compensator_ = 0.0;
  sum_ = 0.0;
  for (int x = 1; x < state_.n; ++x) sum_ += edge_term(x);
}

void MartingaleAccumulator::advance_to(double t) {
  t = std::min(t, stop_);
  if (t > t_) {
    compensator_ += base_ * sum_ * (t - t_);
    t_ = t;
  }
}

bool MartingaleAccumulator::on_event(const Event& e) {
  if (e.time > stop_) {
    advance_to(stop_);
    return true;
  }
  advance_to(e.time);
  if (e.kind != EventKind::kSwap) return true;
  const int x = static_cast<int>(e.site);
  const int n = state_.n;
  // The particle at x moves right, the one at x + 1 moves left.
  drift_ += eps_ * (s_(state_.particle[sz(x)]) - s_(state_.particle[sz(x + 1)]));
  for (int y = std::max(1, x - 1); y <= std::min(n - 1, x + 1); ++y) sum_ -= edge_term(y);
  state_.swap_sites(x);
  for (int y = std::max(1, x - 1); y <= std::min(n - 1, x + 1); ++y) sum_ += edge_term(y);
  return true;
}

void MartingaleAccumulator::on_finish(double t) { advance_to(t); }

double exponential_martingale_log(const EventLog& log, const TiltVector& s, double t) {
  const double end = log.end_time > 0.0 ? log.end_time : log.horizon;
  if (t > end + 1e-12) throw Error("martingale time exceeds the log horizon");
  MartingaleAccumulator acc(s, log.alpha, t);
  acc.on_start(log.initial, 0.0);
  for (const Event& e : log.events) {
    if (e.time > t) break;
    acc.on_event(e);
  }
  acc.on_finish(t);
  return acc.value();
}

TiltVector optimal_tilt(const Permutation& sigma, double t) {
  std::vector<int> j(sz(sigma.size()));
  for (int i = 1; i <= sigma.size(); ++i) j[sz(i - 1)] = sigma(i) - i;
  return TiltVector::from_lattice(j, t);
}

double tilt_exponent(const TiltVector& s, const Permutation& sigma) {
  if (s.size() != sigma.size()) throw Error("tilt vector and permutation sizes differ");
  const double n = sigma.size();
  double lin = 0.0, quad = 0.0;
  for (int i = 1; i <= sigma.size(); ++i) {
    lin += s(i) * (sigma(i) - i) / n;
    quad += s(i) * s(i);
  }
  return lin / n - 0.5 * s.t() * quad / n;
}

double one_slice_upper_rate(const Permutation& sigma, double t) {
  if (!(t > 0.0)) throw Error("time must be positive");
  return permutation_energy(sigma) / t;
}

// ---------------------------------------------------------------------------
// One-block statistic

OneBlockAccumulator::OneBlockAccumulator(int n, std::vector<int> radii) : n_(n), radii_(std::move(radii)) {
  for (int l : radii_)
    if (l < 1 || l >= n) throw Error("box radius must satisfy 1 <= l < N");
  sum_.assign(radii_.size(), std::vector<double>(sz(n), 0.0));
  abs_sum_.assign(radii_.size(), 0.0);
}

void OneBlockAccumulator::add(const SiteObservables& snap) {
  if (snap.a.size() != sz(n_) || snap.b.size() != sz(n_)) throw Error("observables must have N entries");
  std::vector<double> pa(sz(n_) + 1, 0.0), pb(sz(n_) + 1, 0.0);
  for (std::size_t i = 0; i < sz(n_); ++i) {
    pa[i + 1] = pa[i] + snap.a[i];
    pb[i + 1] = pb[i] + snap.b[i];
  }
  for (std::size_t r = 0; r < radii_.size(); ++r) {
    const int l = radii_[r];
    for (int x = 2; x <= n_; ++x) {
      const int lo = std::max(1, x - l), hi = std::min(n_, x + l);
      const double cnt = hi - lo + 1;
      const double ma = (pa[sz(hi)] - pa[sz(lo - 1)]) / cnt;
      const double mb = (pb[sz(hi)] - pb[sz(lo - 1)]) / cnt;
      const double d = snap.a[sz(x - 1)] * snap.b[sz(x - 2)] - ma * mb;
      sum_[r][sz(x - 1)] += d;
      abs_sum_[r] += std::abs(d);
    }
  }
  ++count_;
}

std::vector<OneBlockResult> OneBlockAccumulator::results() const {
  std::vector<OneBlockResult> out(radii_.size());
  if (count_ == 0) return out;
  const double c = static_cast<double>(count_);
  for (std::size_t r = 0; r < radii_.size(); ++r) {
    double s = 0.0;
    for (double v : sum_[r]) s += std::abs(v / c);
    out[r].time_averaged = s / n_;
    out[r].per_snapshot = abs_sum_[r] / (c * n_);
  }
  return out;
}

OneBlockResult one_block_statistic(const std::vector<SiteObservables>& snapshots, int l,
                                   const std::function<double(int)>& psi) {
  if (snapshots.empty()) throw Error("one-block statistic needs at least one snapshot");
  const int n = static_cast<int>(snapshots.front().a.size());
  if (l < 1 || l >= n) throw Error("box radius must satisfy 1 <= l < N");
  std::vector<double> time_sum(sz(n) + 1, 0.0);
  double abs_sum = 0.0;
  for (const SiteObservables& snap : snapshots) {
    if (snap.a.size() != sz(n) || snap.b.size() != sz(n)) throw Error("observables must have N entries");
    for (int x = 2; x <= n; ++x) {
      const int lo = std::max(1, x - l), hi = std::min(n, x + l);
      double ma = 0.0, mb = 0.0;
      for (int y = lo; y <= hi; ++y) {
        ma += snap.a[sz(y - 1)];
        mb += snap.b[sz(y - 1)];
      }
      ma /= hi - lo + 1;
      mb /= hi - lo + 1;
      const double w = psi ? psi(x) : 1.0;
      const double d = w * (snap.a[sz(x - 1)] * snap.b[sz(x - 2)] - ma * mb);
      time_sum[sz(x)] += d;
      abs_sum += std::abs(d);
    }
  }
  const double c = static_cast<double>(snapshots.size());
  OneBlockResult out;
  for (int x = 2; x <= n; ++x) out.time_averaged += std::abs(time_sum[sz(x)] / c);
  out.time_averaged /= n;
  out.per_snapshot = abs_sum / (c * n);
  return out;
}

// ---------------------------------------------------------------------------
// Rare events

RareEventEstimate rare_event_log_probability(const RateTable& rates, const PermutonBall& ball,
                                             const RareEventOptions& opt) {
  if (opt.replicas < 100) throw Error("rare-event estimation needs at least 100 replicas");
  if (rates.n() != opt.n || rates.alpha() != opt.alpha) throw Error("rate table disagrees with N or alpha");
  RareEventEstimate out;
  out.replicas = opt.replicas;
  out.gamma = 3.0 - opt.alpha;
  if (std::isinf(ball.radius)) {
    // Every path is in the ball and the weights have mean one exactly.
    out.hits = opt.replicas;
    return out;
  }
  const int n = opt.n;
  std::vector<double> log_terms(opt.replicas, -std::numeric_limits<double>::infinity());
  std::vector<char> hit(opt.replicas, 0);
  parallel_for(opt.replicas, resolve_threads(opt.threads), [&](std::size_t r) {
    ReplicaStream init_rng(mix64(opt.seed) ^ 0x5bd1e995ULL, r);
    const Configuration init = opt.identity_start ? Configuration::identity_uniform_colors(n, init_rng)
                                                  : Configuration::uniform(n, init_rng);
    RadonNikodymAccumulator acc(rates);
    SimulationOptions so;
    so.replica = r;
    so.record = false;
    so.observer = &acc;
    so.max_events = opt.max_events;
    simulate_biased(rates, opt.horizon, opt.seed, &init, so);
    std::vector<Permuton2D::Point> pts(sz(n));
    for (int i = 1; i <= n; ++i)
      pts[sz(i - 1)] = {static_cast<double>(init.position[sz(i)]) / n,
                        static_cast<double>(acc.state().position[sz(i)]) / n};
    const Permuton2D mu = Permuton2D::from_points(std::move(pts));
    const double d = ball.target.is_grid() ? wasserstein_grid(ball.target, mu).value
                                           : wasserstein_points(mu, ball.target);
    if (d <= ball.radius) {
      hit[r] = 1;
      log_terms[r] = acc.weight().value;
    }
  });
  for (char h : hit) out.hits += h ? 1 : 0;
  const MeanEstimate m = log_mean_exp(log_terms);
  out.log_probability = m.mean;
  out.std_error_log = out.hits ? m.std_error : std::numeric_limits<double>::infinity();
  out.rate = -out.log_probability / std::pow(static_cast<double>(n), out.gamma);
  return out;
}

}  // namespace permuton_lab
