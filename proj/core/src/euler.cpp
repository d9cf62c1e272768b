#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "permuton_lab/euler.hpp"
#include "permuton_lab/parallel.hpp"

namespace permuton_lab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double archimedean_radius(double u) {
  // Solves 1 - sqrt(1 - r^2) = u.
  return std::sqrt(u * (2.0 - u));
}

double archimedean_radius_bisection(double u) {
  // CDF written as r^2 / (1 + sqrt(1 - r^2)) to avoid cancellation at small r.
  auto cdf = [](double r) { return r * r / (1.0 + std::sqrt(std::max(0.0, 1.0 - r * r))); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Point2 archimedean_sample(ReplicaStream& rng) {
  const double theta = 2.0 * kPi * rng.uniform();
  const double r = archimedean_radius(rng.uniform());
  return {r * std::cos(theta), r * std::sin(theta)};
}

double sine_position(const Point2& p, double t) {
  return p.x * std::cos(kPi * t) + p.y * std::sin(kPi * t);
}

SteppedPath sine_process_path(double x, double y, const Partition& grid) {
  if (x * x + y * y > 1.0 + 1e-12) throw Error("sine path start lies outside the unit disk");
  const auto& ts = grid.times();
  std::vector<double> v(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) v[i] = std::clamp(sine_position({x, y}, ts[i]), -1.0, 1.0);
  return SteppedPath::sampled(ts, std::move(v), Chart::kSymmetric);
}

double sine_color(double x, double y) {
  const double c = std::sqrt(std::max(0.0, 1.0 - x * x));
  if (c == 0.0) return 0.5;
  return 0.5 + std::asin(std::clamp(y / c, -1.0, 1.0)) / kPi;
}

Permuton2D archimedean_grid(std::size_t m) {
  if (m == 0) throw Error("grid size must be positive");
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double md = static_cast<double>(m);
  auto edge = [&](std::size_t k) { return -1.0 + 2.0 * static_cast<double>(k) / md; };
  // Mass of [x0,x1] x [y0,y1]: integrate the y-marginal of the density in closed form.
  auto strip = [](double x, double y0, double y1) {
    const double c = std::sqrt(std::max(0.0, 1.0 - x * x));
    if (c == 0.0) return 0.0;
    return (std::asin(std::clamp(y1 / c, -1.0, 1.0)) - std::asin(std::clamp(y0 / c, -1.0, 1.0))) / (2.0 * kPi);
  };
  std::vector<double> w(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x0 = edge(i), x1 = edge(i + 1);
    for (std::size_t j = 0; j < m; ++j) {
      const double y0 = edge(j), y1 = edge(j + 1);
      // Split where the circle crosses the cell's horizontal edges.
      std::vector<double> cuts{x0, x1};
      for (double y : {y0, y1})
        for (double s : {-1.0, 1.0}) {
          const double xc = s * std::sqrt(std::max(0.0, 1.0 - y * y));
          if (xc > x0 && xc < x1) cuts.push_back(xc);
        }
      std::sort(cuts.begin(), cuts.end());
      double mass = 0.0;
      for (std::size_t k = 1; k < cuts.size(); ++k)
        mass += integrator.integrate([&](double x) { return strip(x, y0, y1); }, cuts[k - 1], cuts[k]);
      w[i * m + j] = std::max(0.0, mass);
    }
  }
  // Quadrature leaves ~1e-12 marginal error; a few proportional-fitting
  // sweeps restore exactly uniform marginals.
  for (int sweep = 0; sweep < 20; ++sweep) {
    for (int axis = 0; axis < 2; ++axis)
      for (std::size_t a = 0; a < m; ++a) {
        double s = 0.0;
        for (std::size_t b = 0; b < m; ++b) s += axis == 0 ? w[a * m + b] : w[b * m + a];
        if (s <= 0.0) continue;
        const double scale = 1.0 / (md * s);
        for (std::size_t b = 0; b < m; ++b) (axis == 0 ? w[a * m + b] : w[b * m + a]) *= scale;
      }
  }
  return Permuton2D::from_grid(m, std::move(w));
}

JointDensity sine_joint_density() {
  JointDensity rho;
  rho.density = [](double, double x, double v) {
    const double c = std::sqrt(std::max(0.0, 1.0 - x * x));
    const double w = std::abs(v) / kPi;
    const double arg = (c - w) * (c + w);
    return arg > 0.0 ? 1.0 / std::sqrt(arg) : 0.0;
  };
  rho.support = [](double, double x) {
    const double c = std::sqrt(std::max(0.0, 1.0 - x * x));
    return std::pair{-kPi * c, kPi * c};
  };
  rho.x_lo = -1.0;
  rho.x_hi = 1.0;
  return rho;
}

double quantile_from_density(const JointDensity& rho, double t, double x, double phi) {
  if (!(x > rho.x_lo && x < rho.x_hi)) return 0.0;
  const auto [a, b] = rho.support(t, x);
  if (phi <= 0.0) return a;
  if (phi >= 1.0) return b;
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double v) { return rho.density(t, x, v); };
  // Tight quadrature tolerance so the bisection can resolve phi to ~1e-12.
  constexpr double kTol = 1e-14;
  const double total = integrator.integrate(f, a, b, kTol);
  if (!(total > 0.0)) throw Error("conditional density has no mass");
  double lo = a, hi = b;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double cdf = integrator.integrate(f, a, mid, kTol) / total;
    (cdf >= phi ? hi : lo) = mid;
  }
  return hi;
}

ColoredPath integrate_colored(const QuantileField& field, ColoredState s0, const Partition& grid,
                              const IntegratorOptions& options) {
  const auto& gt = grid.times();
  const double t0 = gt.front(), t1 = gt.back();
  const double span = t1 - t0;
  const std::size_t steps = std::max<std::size_t>(options.steps, 1);

  // Step nodes: the fixed RK4 lattice, the output grid and field breakpoints.
  std::vector<double> nodes;
  nodes.reserve(steps + gt.size() + 8);
  for (std::size_t k = 0; k <= steps; ++k)
    nodes.push_back(t0 + span * static_cast<double>(k) / static_cast<double>(steps));
  nodes.insert(nodes.end(), gt.begin(), gt.end());
  const std::vector<double> breaks = field.breakpoints(t0, t1);
  nodes.insert(nodes.end(), breaks.begin(), breaks.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  ColoredPath out;
  out.times = gt;
  out.states.reserve(gt.size());
  std::size_t next_out = 0;
  ColoredState s{std::clamp(s0.x, 0.0, 1.0), std::clamp(s0.phi, 0.0, 1.0)};
  auto record = [&](double t) {
    while (next_out < gt.size() && gt[next_out] <= t) {
      out.states.push_back(s);
      ++next_out;
    }
  };
  record(nodes.front());

  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double a = nodes[k - 1], b = nodes[k];
    const double h = b - a;
    // Stages evaluate the field strictly inside [a, b) so a jump at b is not seen early.
    const double b_left = std::nextafter(b, a);
    auto deriv = [&](double t, double x, double p) {
      const double tt = std::min(t, b_left);
      const double xc = std::clamp(x, 0.0, 1.0), pc = std::clamp(p, 0.0, 1.0);
      return ColoredState{field.V(tt, xc, pc), field.R(tt, xc, pc)};
    };
    const ColoredState k1 = deriv(a, s.x, s.phi);
    const ColoredState k2 = deriv(a + 0.5 * h, s.x + 0.5 * h * k1.x, s.phi + 0.5 * h * k1.phi);
    const ColoredState k3 = deriv(a + 0.5 * h, s.x + 0.5 * h * k2.x, s.phi + 0.5 * h * k2.phi);
    const ColoredState k4 = deriv(b, s.x + h * k3.x, s.phi + h * k3.phi);
    ColoredState n{s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                   s.phi + h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi)};
    const double viol = std::max({0.0, -n.x, n.x - 1.0, -n.phi, n.phi - 1.0});
    out.max_violation = std::max(out.max_violation, viol);
    if (viol > 1e-6) out.clamped = true;
    s = {std::clamp(n.x, 0.0, 1.0), std::clamp(n.phi, 0.0, 1.0)};
    record(b);
  }
  return out;
}

UniformityReport uniformity_check(const QuantileField& field, std::size_t n, double t,
                                  std::uint64_t seed, const IntegratorOptions& options) {
  if (n < 1000) throw Error("uniformity check needs at least 1000 samples");
  std::vector<double> xs(n), ps(n), viol(n, 0.0);
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, resolve_threads(), [&](std::size_t c) {
    ReplicaStream rng(seed, c);
    for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
      const ColoredState s0{rng.uniform(), rng.uniform()};
      if (t <= 0.0) {
        xs[i] = s0.x;
        ps[i] = s0.phi;
        continue;
      }
      const ColoredPath path = integrate_colored(field, s0, Partition({0.0, t}), options);
      xs[i] = path.states.back().x;
      ps[i] = path.states.back().phi;
      viol[i] = path.max_violation;
    }
  });
  UniformityReport r;
  r.samples = n;
  r.chi_square = chi_square_uniform_2d(xs, ps, 10);
  r.max_violation = *std::max_element(viol.begin(), viol.end());
  return r;
}

}  // namespace permuton_lab
