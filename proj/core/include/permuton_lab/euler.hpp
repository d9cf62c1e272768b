#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "permuton_lab/core.hpp"
#include "permuton_lab/rng.hpp"
#include "permuton_lab/stats.hpp"

namespace permuton_lab {

/// Velocity quantile V_t(x, phi) of a generalized flow, with the derived
/// color drift R = -int_0^phi dV/dx and stream F = int_0^phi V.
/// Position lives in [0,1] (Chart::kUnit) or [-1,1] (Chart::kSymmetric);
/// the color level phi is always in [0,1].
class QuantileField {
 public:
  virtual ~QuantileField() = default;

  virtual double V(double t, double x, double phi) const = 0;
  /// Central difference with h = 1e-5 unless overridden.
  virtual double dVdx(double t, double x, double phi) const;
  /// Gauss-Legendre quadrature of -int_0^phi dV/dx unless overridden.
  virtual double R(double t, double x, double phi) const;
  /// Gauss-Legendre quadrature of int_0^phi V unless overridden.
  virtual double stream(double t, double x, double phi) const;

  virtual Chart chart() const { return Chart::kUnit; }
  virtual bool time_independent() const { return false; }
  /// Times where the field may jump in t; integrators restart there.
  virtual std::vector<double> breakpoints(double /*t0*/, double /*t1*/) const { return {}; }
};

using FieldPtr = std::shared_ptr<const QuantileField>;

/// V = 0.
FieldPtr zero_field();
/// Sine-curve quantile on [-1,1]: V = pi sqrt(1 - x^2) sin(pi (phi - 1/2)).
FieldPtr sine_field_symmetric();
/// The sine-curve field carried to [0,1]; x -> (x+1)/2 halves velocities.
FieldPtr sine_field();
/// Carries a [-1,1] field to [0,1].
FieldPtr rescale_to_unit(FieldPtr symmetric);
/// Arbitrary user field on [0,1] (dV/dx by finite differences if absent).
FieldPtr function_field(std::function<double(double, double, double)> v,
                        std::function<double(double, double, double)> dvdx = nullptr,
                        bool time_independent = false);
/// Trilinear interpolation of V tabulated on a (t, x, phi) lattice, read
/// from CSV rows `t,x,phi,V` (header optional).
FieldPtr tabulated_field_from_csv(const std::string& path);
FieldPtr tabulated_field(std::vector<double> ts, std::vector<double> xs, std::vector<double> phis,
                         std::vector<double> values);

/// Lookup by name: `zero`, `sine`, `sine-symmetric`, or `csv:<path>`.
FieldPtr make_field(const std::string& name);

/// Boundary smoothing V^beta: equal to V on [beta, 1-beta], a smooth-step
/// times the linearization of V at beta (mirrored at 1-beta) outside.
/// Symmetric-chart inputs are rescaled to [0,1] first.
FieldPtr smooth_boundary(FieldPtr field, double beta);

/// Quintic smoothstep used by smooth_boundary: 0 on [0, beta/2], 1 on
/// [3 beta/4, beta].  Returns (f, f').
std::pair<double, double> boundary_step(double x, double beta);

/// Piecewise-constant-in-time field V(t_k) on [t_k, t_{k+1}), t_k = k delta,
/// for t in [0, horizon]; the last cell absorbs a non-integer remainder.
FieldPtr piecewise_time(FieldPtr field, double delta, double horizon);

/// Index k of the piecewise-time cell holding t.
std::size_t time_cell(double t, double delta, std::size_t cells);

// --- Sine curve process -----------------------------------------------------

struct Point2 {
  double x;
  double y;
};

/// Inverse CDF of the Archimedean radius, CDF(r) = 1 - sqrt(1 - r^2).
double archimedean_radius(double u);
/// Same quantity by bisection on the CDF.
double archimedean_radius_bisection(double u);
/// Draw from the density 1 / (2 pi sqrt(1 - x^2 - y^2)) on the unit disk.
Point2 archimedean_sample(ReplicaStream& rng);
/// X cos(pi t) + Y sin(pi t).
double sine_position(const Point2& p, double t);
/// Dense-sample path of the sine curve process in [-1,1] on the grid.
SteppedPath sine_process_path(double x, double y, const Partition& grid);
/// Color level of the sine particle started at (x, y): the phi with
/// V(x, phi) = pi y.
double sine_color(double x, double y);

/// Archimedean permuton (rescaled to [0,1]^2) integrated over an m x m grid.
Permuton2D archimedean_grid(std::size_t m);

// --- Quantiles from a joint density ------------------------------------------

/// Unnormalized joint density of (position, velocity) at time t together
/// with the velocity support at each position.
struct JointDensity {
  std::function<double(double t, double x, double v)> density;
  std::function<std::pair<double, double>(double t, double x)> support;
  /// Open position interval; outside it the quantile is 0.
  double x_lo = 0.0;
  double x_hi = 1.0;
};

/// Joint density of (A_t, A_t') for the sine curve process, [-1,1] chart.
JointDensity sine_joint_density();

/// inf{v : F_{t,x}(v) >= phi} by bisection on the integrated conditional CDF.
double quantile_from_density(const JointDensity& rho, double t, double x, double phi);

/// -int_0^phi dV/dx dpsi for any field (the field's R method).
double color_drift(const QuantileField& field, double t, double x, double phi);

// --- Colored trajectories -----------------------------------------------------

struct ColoredState {
  double x;
  double phi;
};

struct ColoredPath {
  std::vector<double> times;
  std::vector<ColoredState> states;
  /// Largest amount a state left [0,1]^2 before being clamped.
  double max_violation = 0.0;
  bool clamped = false;
};

struct IntegratorOptions {
  /// Fixed RK4 steps over the whole grid span (default T/4096).
  std::size_t steps = 4096;
};

/// RK4 for x' = V(t, x, phi), phi' = R(t, x, phi); restarts at field
/// breakpoints and records states at the grid times.
ColoredPath integrate_colored(const QuantileField& field, ColoredState s0, const Partition& grid,
                              const IntegratorOptions& options = {});

struct UniformityReport {
  ChiSquareResult chi_square;
  std::size_t samples = 0;
  double max_violation = 0.0;
};

/// Integrates n uniformly drawn colored states to time t and tests the
/// endpoint cloud against the uniform law on a 10 x 10 grid.
UniformityReport uniformity_check(const QuantileField& field, std::size_t n, double t,
                                  std::uint64_t seed, const IntegratorOptions& options = {});

}  // namespace permuton_lab
