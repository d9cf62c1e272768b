#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace permuton_lab {

/// Raised on violated preconditions and malformed inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A permutation of {1..N}; `mapping()[i-1]` is sigma(i).
class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping);

  static Permutation identity(int n);
  static Permutation reverse(int n);

  int size() const { return static_cast<int>(mapping_.size()); }
  /// sigma(i) for 1-based i.
  int operator()(int i) const { return mapping_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<int>& mapping() const { return mapping_; }

  Permutation inverse() const;
  /// (this * other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const;
  long long inversions() const;

  bool operator==(const Permutation& o) const { return mapping_ == o.mapping_; }

 private:
  std::vector<int> mapping_;
};

/// Strictly increasing time grid 0 = t_0 < ... < t_k = T.
class Partition {
 public:
  explicit Partition(std::vector<double> times);

  /// 2^depth equal cells on [t0, t1].
  static Partition dyadic(double t0, double t1, int depth);
  static Partition uniform(double t0, double t1, std::size_t cells);

  const std::vector<double>& times() const { return times_; }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  std::size_t size() const { return times_.size(); }

 private:
  std::vector<double> times_;
};

/// Value range of a path or field: the unit interval or the symmetric [-1,1].
enum class Chart { kUnit, kSymmetric };

/// A real-valued path on [t0, T].  Either a cadlag step function (initial
/// value plus time-ordered jumps) or dense samples joined linearly.
class SteppedPath {
 public:
  struct Jump {
    double time;
    double value;
  };

  static SteppedPath stepped(double t0, double horizon, double initial, std::vector<Jump> jumps,
                             Chart chart = Chart::kUnit);
  static SteppedPath sampled(std::vector<double> times, std::vector<double> values,
                             Chart chart = Chart::kUnit);
  static SteppedPath constant(double t0, double horizon, double value, Chart chart = Chart::kUnit);

  /// Right-continuous evaluation; clamps t into [t0, T].
  double operator()(double t) const;

  bool is_sampled() const { return !sample_times_.empty(); }
  double t0() const { return t0_; }
  double horizon() const { return horizon_; }
  double initial() const { return initial_; }
  Chart chart() const { return chart_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::vector<double>& sample_times() const { return sample_times_; }
  const std::vector<double>& sample_values() const { return sample_values_; }

  /// Affine image a + b * gamma, for chart changes.
  SteppedPath affine(double a, double b, Chart chart) const;

 private:
  SteppedPath() = default;

  double t0_ = 0.0;
  double horizon_ = 0.0;
  double initial_ = 0.0;
  Chart chart_ = Chart::kUnit;
  std::vector<Jump> jumps_;
  std::vector<double> sample_times_;
  std::vector<double> sample_values_;
};

/// Uniformly weighted family of paths sharing a horizon.
class PathEnsemble {
 public:
  explicit PathEnsemble(std::vector<SteppedPath> paths);

  const std::vector<SteppedPath>& paths() const { return paths_; }
  std::size_t size() const { return paths_.size(); }
  double t0() const { return paths_.front().t0(); }
  double horizon() const { return paths_.front().horizon(); }

 private:
  std::vector<SteppedPath> paths_;
};

/// A probability measure on [0,1]^2: uniformly weighted points or an m x m
/// histogram (cell (i, j) covers x in [i/m,(i+1)/m), y in [j/m,(j+1)/m)).
class Permuton2D {
 public:
  struct Point {
    double x;
    double y;
  };

  static Permuton2D from_points(std::vector<Point> points);
  /// `weights` is row-major with row index = x cell.  Requires total mass 1;
  /// with `check_marginals`, also row and column sums 1/m within 1e-9.
  static Permuton2D from_grid(std::size_t m, std::vector<double> weights,
                              bool check_marginals = true);
  /// Bins points onto an m x m grid; a coordinate c lands in cell ceil(c m) - 1.
  static Permuton2D binned(const Permuton2D& points, std::size_t m);

  bool is_grid() const { return m_ > 0; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t grid_size() const { return m_; }
  const std::vector<double>& weights() const { return weights_; }
  double cell(std::size_t i, std::size_t j) const { return weights_[i * m_ + j]; }

 private:
  Permuton2D() = default;

  std::vector<Point> points_;
  std::size_t m_ = 0;
  std::vector<double> weights_;
};

/// Points (i/N, sigma(i)/N).
Permuton2D empirical_permuton(const Permutation& sigma);

/// Histogram of the permuton of (X, 1 - X) (reverse) or (X, X) (identity).
Permuton2D diagonal_grid(std::size_t m, bool anti);

/// 1/2 sum |gamma(t_i) - gamma(t_{i-1})|^2 / (t_i - t_{i-1}).
double path_energy(const SteppedPath& gamma, const Partition& partition);

/// Mean path energy at the dyadic partition with 2^depth cells.
double process_energy(const PathEnsemble& ensemble, int depth = 10);

/// 1/2 (1/N) sum ((sigma(i) - i)/N)^2.
double permutation_energy(const Permutation& sigma);

/// 1/2 E|X - Y|^2; grid cells are evaluated at their midpoints.
double permuton_energy(const Permuton2D& mu);

}  // namespace permuton_lab
