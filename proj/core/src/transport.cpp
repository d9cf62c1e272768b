#include <algorithm>
#include <cmath>
#include <numeric>

#include "permuton_lab/transport.hpp"

namespace permuton_lab {

namespace {

constexpr std::size_t kMaxLcmPoints = 4096;

std::vector<WeightedPoint> grid_support(const Permuton2D& g) {
  const std::size_t m = g.grid_size();
  const double md = static_cast<double>(m);
  std::vector<WeightedPoint> out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (g.cell(i, j) > 0.0)
        out.push_back({(static_cast<double>(i) + 0.5) / md, (static_cast<double>(j) + 0.5) / md, g.cell(i, j)});
  return out;
}

std::vector<WeightedPoint> point_support(const Permuton2D& p) {
  std::vector<WeightedPoint> out;
  const double w = 1.0 / static_cast<double>(p.points().size());
  for (const auto& q : p.points()) out.push_back({q.x, q.y, w});
  return out;
}

}  // namespace

double wasserstein_points(const Permuton2D& a, const Permuton2D& b) {
  if (a.is_grid() || b.is_grid()) throw Error("wasserstein_points expects point permutons");
  const std::size_t na = a.points().size(), nb = b.points().size();
  const std::size_t n = std::lcm(na, nb);
  if (n > kMaxLcmPoints) {
    // Duplication would be too large; the transportation simplex is exact too.
    return transport_exact(point_support(a), point_support(b)).value;
  }
  const std::size_t ka = n / na, kb = n / nb;
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = a.points()[i / ka];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& q = b.points()[j / kb];
      c(i, j) = std::hypot(p.x - q.x, p.y - q.y);
    }
  }
  return solve_assignment(c).total_cost / static_cast<double>(n);
}

GridDistance wasserstein_grid(const Permuton2D& a, const Permuton2D& b, GridSolver solver) {
  if (!a.is_grid() && !b.is_grid()) throw Error("wasserstein_grid needs at least one grid permuton");
  const std::size_t m = a.is_grid() ? a.grid_size() : b.grid_size();
  const Permuton2D ga = a.is_grid() ? a : Permuton2D::binned(a, m);
  const Permuton2D gb = b.is_grid() ? b : Permuton2D::binned(b, m);
  if (ga.grid_size() != gb.grid_size()) throw Error("grid resolutions differ");
  const auto sa = grid_support(ga);
  const auto sb = grid_support(gb);
  if (solver == GridSolver::kAuto) solver = m * m > 10'000 ? GridSolver::kEntropic : GridSolver::kExact;
  if (solver == GridSolver::kEntropic) return transport_entropic(sa, sb);
  return transport_exact(sa, sb);
}

Partition default_path_grid(const PathEnsemble& e1, const PathEnsemble& e2, std::size_t cap) {
  const double t0 = e1.t0(), t1 = e1.horizon();
  std::vector<double> times{t0, t1};
  bool overflow = false;
  for (const PathEnsemble* e : {&e1, &e2}) {
    for (const SteppedPath& p : e->paths()) {
      if (p.is_sampled()) {
        times.insert(times.end(), p.sample_times().begin(), p.sample_times().end());
      } else {
        for (const auto& j : p.jumps()) times.push_back(j.time);
      }
      if (times.size() > 4 * cap) {
        overflow = true;
        break;
      }
    }
    if (overflow) break;
  }
  if (!overflow) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (times.size() <= cap) return Partition(std::move(times));
  }
  return Partition::uniform(t0, t1, cap - 1);
}

double path_ensemble_distance(const PathEnsemble& e1, const PathEnsemble& e2,
                              const std::optional<Partition>& grid) {
  if (e1.horizon() != e2.horizon() || e1.t0() != e2.t0()) throw Error("ensemble horizons differ");
  if (e1.size() != e2.size()) throw Error("ensembles must have equal path counts");
  const Partition g = grid ? *grid : default_path_grid(e1, e2);
  const auto& ts = g.times();
  const std::size_t n = e1.size(), k = ts.size();
  auto sample = [&](const PathEnsemble& e) {
    std::vector<double> out(n * k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t s = 0; s < k; ++s) out[i * k + s] = e.paths()[i](ts[s]);
    return out;
  };
  const auto v1 = sample(e1);
  const auto v2 = sample(e2);
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double mx = 0.0;
      const double* a = &v1[i * k];
      const double* b = &v2[j * k];
      for (std::size_t s = 0; s < k; ++s) mx = std::max(mx, std::abs(a[s] - b[s]));
      c(i, j) = mx;
    }
  return solve_assignment(c).total_cost / static_cast<double>(n);
}

}  // namespace permuton_lab
