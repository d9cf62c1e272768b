// Transportation simplex on the complete bipartite graph between two
// discrete measures.  Costs are Euclidean distances computed on demand, so
// memory stays linear in the number of support points.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "permuton_lab/transport.hpp"

namespace permuton_lab {

namespace {

struct BasicArc {
  std::size_t i;
  std::size_t j;
  double flow;
};

class TransportSimplex {
 public:
  TransportSimplex(const std::vector<WeightedPoint>& s, const std::vector<WeightedPoint>& d)
      : s_(s), d_(d), n1_(s.size()), n2_(d.size()) {
    adjacency_.resize(n1_ + n2_);
    potential_.assign(n1_ + n2_, 0.0);
    parent_arc_.assign(n1_ + n2_, kNone);
    parent_.assign(n1_ + n2_, kNone);
    depth_.assign(n1_ + n2_, 0);
  }

  GridDistance solve(std::size_t max_iterations) {
    northwest_corner();
    rebuild_tree();
    const std::size_t cells = n1_ * n2_;
    const std::size_t block =
        std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(static_cast<double>(cells))));
    std::size_t cursor = 0;
    std::size_t iterations = 0;
    while (true) {
      // Block pricing: scan cells in blocks and enter the most negative
      // reduced cost of the first block that has one.
      double best = -kTolerance;
      std::size_t best_cell = kNone;
      std::size_t scanned = 0, in_block = 0;
      while (scanned < cells) {
        const std::size_t i = cursor / n2_, j = cursor % n2_;
        const double rc = cost(i, j) - potential_[i] - potential_[n1_ + j];
        if (rc < best) {
          best = rc;
          best_cell = cursor;
        }
        ++scanned;
        ++in_block;
        if (++cursor == cells) cursor = 0;
        if (in_block == block) {
          if (best_cell != kNone) break;
          in_block = 0;
        }
      }
      if (best_cell == kNone) break;
      if (++iterations > max_iterations) throw Error("transport simplex exceeded its iteration cap");
      pivot(best_cell / n2_, best_cell % n2_);
    }
    GridDistance out;
    for (const BasicArc& a : arcs_) out.value += a.flow * cost(a.i, a.j);
    out.iterations = iterations;
    return out;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr double kTolerance = 1e-12;

  double cost(std::size_t i, std::size_t j) const {
    return std::hypot(s_[i].x - d_[j].x, s_[i].y - d_[j].y);
  }

  void add_arc(std::size_t i, std::size_t j, double flow) {
    arcs_.push_back({i, j, flow});
    adjacency_[i].push_back(arcs_.size() - 1);
    adjacency_[n1_ + j].push_back(arcs_.size() - 1);
  }

  void northwest_corner() {
    std::vector<double> ra(n1_), rb(n2_);
    for (std::size_t i = 0; i < n1_; ++i) ra[i] = s_[i].mass;
    for (std::size_t j = 0; j < n2_; ++j) rb[j] = d_[j].mass;
    std::size_t i = 0, j = 0;
    while (true) {
      const double q = std::max(0.0, std::min(ra[i], rb[j]));
      add_arc(i, j, q);
      ra[i] -= q;
      rb[j] -= q;
      if (i == n1_ - 1 && j == n2_ - 1) break;
      if (i == n1_ - 1) {
        ++j;
      } else if (j == n2_ - 1) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Roots the basis tree at supply node 0 and recomputes potentials.
  void rebuild_tree() {
    std::deque<std::size_t> queue{0};
    std::fill(parent_.begin(), parent_.end(), kNone);
    parent_[0] = 0;
    parent_arc_[0] = kNone;
    depth_[0] = 0;
    potential_[0] = 0.0;
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      for (std::size_t a : adjacency_[node]) {
        const std::size_t other = node < n1_ ? n1_ + arcs_[a].j : arcs_[a].i;
        if (parent_[other] != kNone) continue;
        parent_[other] = node;
        parent_arc_[other] = a;
        depth_[other] = depth_[node] + 1;
        const double c = cost(arcs_[a].i, arcs_[a].j);
        potential_[other] = c - potential_[node];
        queue.push_back(other);
      }
    }
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Cycle: entering arc ei -> ej, then the tree path from ej back to ei.
    // Moving along an arc from its demand end to its supply end decreases flow.
    std::vector<std::pair<std::size_t, int>> cycle;  // (arc, sign)
    std::size_t a = n1_ + ej, b = ei;
    std::vector<std::pair<std::size_t, int>> tail;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        cycle.push_back({parent_arc_[a], a >= n1_ ? -1 : +1});
        a = parent_[a];
      } else {
        tail.push_back({parent_arc_[b], b < n1_ ? -1 : +1});
        b = parent_[b];
      }
    }
    cycle.insert(cycle.end(), tail.rbegin(), tail.rend());

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (const auto& [arc, sign] : cycle) {
      if (sign < 0 && arcs_[arc].flow < theta) {
        theta = arcs_[arc].flow;
        leaving = arc;
      }
    }
    theta = std::max(theta, 0.0);
    for (const auto& [arc, sign] : cycle) arcs_[arc].flow = std::max(0.0, arcs_[arc].flow + sign * theta);

    // Replace the leaving arc's slot by the entering arc.
    auto drop = [&](std::size_t node) {
      auto& adj = adjacency_[node];
      adj.erase(std::find(adj.begin(), adj.end(), leaving));
    };
    drop(arcs_[leaving].i);
    drop(n1_ + arcs_[leaving].j);
    arcs_[leaving] = {ei, ej, theta};
    adjacency_[ei].push_back(leaving);
    adjacency_[n1_ + ej].push_back(leaving);
    rebuild_tree();
  }

  const std::vector<WeightedPoint>& s_;
  const std::vector<WeightedPoint>& d_;
  std::size_t n1_, n2_;
  std::vector<BasicArc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> potential_;
  std::vector<std::size_t> parent_arc_, parent_;
  std::vector<std::size_t> depth_;
};

std::vector<WeightedPoint> positive_part(const std::vector<WeightedPoint>& pts) {
  std::vector<WeightedPoint> out;
  for (const WeightedPoint& p : pts) {
    if (p.mass < 0.0) throw Error("negative transport mass");
    if (p.mass > 0.0) out.push_back(p);
  }
  if (out.empty()) throw Error("transport measure has no mass");
  return out;
}

void check_balance(const std::vector<WeightedPoint>& s, const std::vector<WeightedPoint>& d) {
  double ms = 0.0, md = 0.0;
  for (const auto& p : s) ms += p.mass;
  for (const auto& p : d) md += p.mass;
  if (std::abs(ms - md) > 1e-9 * std::max(1.0, ms)) throw Error("transport masses are unbalanced");
}

}  // namespace

GridDistance transport_exact(const std::vector<WeightedPoint>& supply,
                             const std::vector<WeightedPoint>& demand, std::size_t max_iterations) {
  const auto s = positive_part(supply);
  const auto d = positive_part(demand);
  check_balance(s, d);
  TransportSimplex solver(s, d);
  return solver.solve(max_iterations);
}

GridDistance transport_entropic(const std::vector<WeightedPoint>& supply,
                                const std::vector<WeightedPoint>& demand, double regularization,
                                std::size_t max_iterations) {
  const auto s = positive_part(supply);
  const auto d = positive_part(demand);
  check_balance(s, d);
  const std::size_t n1 = s.size(), n2 = d.size();
  const double eps = regularization;
  auto cost = [&](std::size_t i, std::size_t j) { return std::hypot(s[i].x - d[j].x, s[i].y - d[j].y); };
  std::vector<double> f(n1, 0.0), g(n2, 0.0), la(n1), lb(n2);
  for (std::size_t i = 0; i < n1; ++i) la[i] = std::log(s[i].mass);
  for (std::size_t j = 0; j < n2; ++j) lb[j] = std::log(d[j].mass);

  // Soft-min over one index in log space.
  auto softmin = [&](auto&& term, std::size_t count) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) m = std::max(m, term(k));
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += std::exp(term(k) - m);
    return m + std::log(acc);
  };

  GridDistance out;
  out.approximate = true;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < n1; ++i)
      f[i] = -eps * softmin([&](std::size_t j) { return (g[j] - cost(i, j)) / eps + lb[j]; }, n2);
    double err = 0.0;
    for (std::size_t j = 0; j < n2; ++j) {
      const double gj = -eps * softmin([&](std::size_t i) { return (f[i] - cost(i, j)) / eps + la[i]; }, n1);
      g[j] = gj;
    }
    // Row-marginal violation after the column update.
    for (std::size_t i = 0; i < n1; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n2; ++j)
        row += std::exp((f[i] + g[j] - cost(i, j)) / eps + la[i] + lb[j]);
      err += std::abs(row - s[i].mass);
    }
    out.iterations = it + 1;
    if (err < 1e-9) break;
  }
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const double c = cost(i, j);
      out.value += std::exp((f[i] + g[j] - c) / eps + la[i] + lb[j]) * c;
    }
  return out;
}

}  // namespace permuton_lab
