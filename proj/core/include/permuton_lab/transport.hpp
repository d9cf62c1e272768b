#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "permuton_lab/core.hpp"

namespace permuton_lab {

/// Dense n x n cost matrix, row-major.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t n, double fill = 0.0);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return costs_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return costs_[i * n_ + j]; }
  const double* row(std::size_t i) const { return costs_.data() + i * n_; }

 private:
  std::size_t n_;
  std::vector<double> costs_;
};

struct Assignment {
  /// column_of_row[i] is the column matched to row i.
  std::vector<std::size_t> column_of_row;
  double total_cost = 0.0;
};

/// Exact minimum-cost perfect matching by shortest augmenting paths, O(n^3).
Assignment solve_assignment(const CostMatrix& costs);

/// Minimum over all n! matchings; for validation on tiny inputs.
double brute_force_assignment(const CostMatrix& costs);

/// W1 between equally weighted point clouds under Euclidean ground cost.
/// Clouds of different sizes are duplicated up to the least common multiple.
double wasserstein_points(const Permuton2D& a, const Permuton2D& b);

enum class GridSolver { kAuto, kExact, kEntropic };

struct GridDistance {
  double value = 0.0;
  /// True when the entropic solver was used, so `value` is approximate.
  bool approximate = false;
  std::size_t iterations = 0;
};

/// W1 between two m x m histograms (a point permuton is binned first).
/// kAuto solves exactly unless m^2 > 1e4.
GridDistance wasserstein_grid(const Permuton2D& a, const Permuton2D& b,
                              GridSolver solver = GridSolver::kAuto);

struct WeightedPoint {
  double x;
  double y;
  double mass;
};

/// Exact transportation problem between two discrete measures of equal total
/// mass under Euclidean cost (network simplex on the bipartite graph).
GridDistance transport_exact(const std::vector<WeightedPoint>& supply,
                             const std::vector<WeightedPoint>& demand,
                             std::size_t max_iterations = 50'000'000);

/// Log-domain Sinkhorn estimate of the same problem; returns the cost of the
/// regularized plan.
GridDistance transport_entropic(const std::vector<WeightedPoint>& supply,
                                const std::vector<WeightedPoint>& demand,
                                double regularization = 2e-3, std::size_t max_iterations = 2000);

/// Default grid for path distances: union of jump times when at most `cap`
/// points, else `cap` uniform points.
Partition default_path_grid(const PathEnsemble& e1, const PathEnsemble& e2, std::size_t cap = 2048);

/// (1/n) min-cost matching with cost max_t |gamma_i(t) - gamma'_j(t)| over grid times.
double path_ensemble_distance(const PathEnsemble& e1, const PathEnsemble& e2,
                              const std::optional<Partition>& grid = std::nullopt);

}  // namespace permuton_lab
