#include "permuton_lab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace permuton_lab {

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
  const int n = size();
  if (n < 1) throw Error("permutation must be nonempty");
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (int v : mapping_) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)])
      throw Error("mapping is not a bijection on {1..N}");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 1);
  return Permutation(std::move(m));
}

Permutation Permutation::reverse(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = n - i;
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i)
    inv[static_cast<std::size_t>(mapping_[i] - 1)] = static_cast<int>(i) + 1;
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw Error("composing permutations of different sizes");
  std::vector<int> out(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) out[i] = (*this)(other.mapping_[i]);
  return Permutation(std::move(out));
}

long long Permutation::inversions() const {
  long long count = 0;
  for (std::size_t i = 0; i < mapping_.size(); ++i)
    for (std::size_t j = i + 1; j < mapping_.size(); ++j)
      if (mapping_[i] > mapping_[j]) ++count;
  return count;
}

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw Error("partition needs at least two points");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw Error("partition times must be strictly increasing");
}

Partition Partition::dyadic(double t0, double t1, int depth) {
  if (depth < 0 || depth > 30) throw Error("dyadic depth out of range");
  return uniform(t0, t1, std::size_t{1} << depth);
}

Partition Partition::uniform(double t0, double t1, std::size_t cells) {
  if (cells == 0 || !(t1 > t0)) throw Error("invalid uniform partition");
  std::vector<double> t(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(cells);
  t.back() = t1;
  return Partition(std::move(t));
}

namespace {

void check_value(double v, Chart chart) {
  const double lo = chart == Chart::kUnit ? 0.0 : -1.0;
  constexpr double kSlack = 1e-12;
  if (!(v >= lo - kSlack && v <= 1.0 + kSlack)) throw Error("path value outside its chart");
}

}  // namespace

SteppedPath SteppedPath::stepped(double t0, double horizon, double initial,
                                 std::vector<Jump> jumps, Chart chart) {
  if (!(horizon >= t0)) throw Error("path horizon precedes its start");
  check_value(initial, chart);
  double prev = -INFINITY;
  for (const Jump& j : jumps) {
    if (!(j.time > prev) || j.time < t0 || j.time > horizon)
      throw Error("jump times must be strictly increasing within [t0, T]");
    check_value(j.value, chart);
    prev = j.time;
  }
  SteppedPath p;
  p.t0_ = t0;
  p.horizon_ = horizon;
  p.initial_ = initial;
  p.chart_ = chart;
  p.jumps_ = std::move(jumps);
  return p;
}

SteppedPath SteppedPath::sampled(std::vector<double> times, std::vector<double> values,
                                 Chart chart) {
  if (times.size() < 2 || times.size() != values.size())
    throw Error("sampled path needs matching time and value arrays of length >= 2");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw Error("sample times must be strictly increasing");
  for (double v : values) check_value(v, chart);
  SteppedPath p;
  p.t0_ = times.front();
  p.horizon_ = times.back();
  p.initial_ = values.front();
  p.chart_ = chart;
  p.sample_times_ = std::move(times);
  p.sample_values_ = std::move(values);
  return p;
}

SteppedPath SteppedPath::constant(double t0, double horizon, double value, Chart chart) {
  return stepped(t0, horizon, value, {}, chart);
}

double SteppedPath::operator()(double t) const {
  if (is_sampled()) {
    if (t <= sample_times_.front()) return sample_values_.front();
    if (t >= sample_times_.back()) return sample_values_.back();
    const auto it = std::upper_bound(sample_times_.begin(), sample_times_.end(), t);
    const auto k = static_cast<std::size_t>(it - sample_times_.begin());
    const double ta = sample_times_[k - 1], tb = sample_times_[k];
    if (t == ta) return sample_values_[k - 1];
    const double w = (t - ta) / (tb - ta);
    return sample_values_[k - 1] + w * (sample_values_[k] - sample_values_[k - 1]);
  }
  const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                                   [](double tt, const Jump& j) { return tt < j.time; });
  if (it == jumps_.begin()) return initial_;
  return std::prev(it)->value;
}

SteppedPath SteppedPath::affine(double a, double b, Chart chart) const {
  if (is_sampled()) {
    std::vector<double> v(sample_values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a + b * sample_values_[i];
    return sampled(sample_times_, std::move(v), chart);
  }
  std::vector<Jump> j(jumps_.size());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = {jumps_[i].time, a + b * jumps_[i].value};
  return stepped(t0_, horizon_, a + b * initial_, std::move(j), chart);
}

PathEnsemble::PathEnsemble(std::vector<SteppedPath> paths) : paths_(std::move(paths)) {
  if (paths_.empty()) throw Error("path ensemble must be nonempty");
  for (const SteppedPath& p : paths_)
    if (p.horizon() != paths_.front().horizon() || p.t0() != paths_.front().t0())
      throw Error("all paths in an ensemble must share [t0, T]");
}

Permuton2D Permuton2D::from_points(std::vector<Point> points) {
  if (points.empty()) throw Error("empirical permuton needs at least one point");
  for (const Point& p : points)
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
      throw Error("permuton point outside [0,1]^2");
  Permuton2D mu;
  mu.points_ = std::move(points);
  return mu;
}

Permuton2D Permuton2D::from_grid(std::size_t m, std::vector<double> weights,
                                 bool check_marginals) {
  if (m == 0 || weights.size() != m * m) throw Error("grid weights must be m x m");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error("grid weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("grid weights must sum to 1");
  if (check_marginals) {
    const double target = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0, col = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        row += weights[i * m + j];
        col += weights[j * m + i];
      }
      if (std::abs(row - target) > 1e-9 || std::abs(col - target) > 1e-9)
        throw Error("grid marginals are not uniform");
    }
  }
  Permuton2D mu;
  mu.m_ = m;
  mu.weights_ = std::move(weights);
  return mu;
}

Permuton2D Permuton2D::binned(const Permuton2D& points, std::size_t m) {
  if (points.is_grid()) throw Error("binning expects a point permuton");
  const double md = static_cast<double>(m);
  auto bin = [&](double c) {
    const double k = std::ceil(c * md) - 1.0;
    return static_cast<std::size_t>(std::clamp(k, 0.0, md - 1.0));
  };
  std::vector<double> w(m * m, 0.0);
  const double unit = 1.0 / static_cast<double>(points.points().size());
  for (const Point& p : points.points()) w[bin(p.x) * m + bin(p.y)] += unit;
  return from_grid(m, std::move(w), false);
}

Permuton2D empirical_permuton(const Permutation& sigma) {
  const int n = sigma.size();
  std::vector<Permuton2D::Point> pts(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    pts[static_cast<std::size_t>(i - 1)] = {static_cast<double>(i) / n,
                                            static_cast<double>(sigma(i)) / n};
  return Permuton2D::from_points(std::move(pts));
}

Permuton2D diagonal_grid(std::size_t m, bool anti) {
  std::vector<double> w(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) w[i * m + (anti ? m - 1 - i : i)] = 1.0 / static_cast<double>(m);
  return Permuton2D::from_grid(m, std::move(w));
}

double path_energy(const SteppedPath& gamma, const Partition& partition) {
  const auto& t = partition.times();
  if (t.front() < gamma.t0() - 1e-12 || t.back() > gamma.horizon() + 1e-12)
    throw Error("partition exceeds the path's time domain");
  double sum = 0.0;
  double prev = gamma(t.front());
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double cur = gamma(t[i]);
    const double d = cur - prev;
    sum += d * d / (t[i] - t[i - 1]);
    prev = cur;
  }
  return 0.5 * sum;
}

double process_energy(const PathEnsemble& ensemble, int depth) {
  const Partition part = Partition::dyadic(ensemble.t0(), ensemble.horizon(), depth);
  double sum = 0.0;
  for (const SteppedPath& p : ensemble.paths()) sum += path_energy(p, part);
  return sum / static_cast<double>(ensemble.size());
}

double permutation_energy(const Permutation& sigma) {
  const double n = sigma.size();
  double sum = 0.0;
  for (int i = 1; i <= sigma.size(); ++i) {
    // Same operation order as the point-permuton energy so the two agree bitwise.
    const double x = i / n, y = sigma(i) / n;
    sum += (x - y) * (x - y);
  }
  return 0.5 * sum / static_cast<double>(sigma.size());
}

double permuton_energy(const Permuton2D& mu) {
  double sum = 0.0;
  if (mu.is_grid()) {
    const std::size_t m = mu.grid_size();
    const double md = static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double d = (static_cast<double>(i) - static_cast<double>(j)) / md;
        sum += mu.cell(i, j) * d * d;
      }
    return 0.5 * sum;
  }
  for (const auto& p : mu.points()) sum += (p.x - p.y) * (p.x - p.y);
  return 0.5 * sum / static_cast<double>(mu.points().size());
}

}  // namespace permuton_lab
