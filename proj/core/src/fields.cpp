#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "permuton_lab/euler.hpp"

namespace permuton_lab {

namespace {

constexpr double kPi = std::numbers::pi;
using Gauss30 = boost::math::quadrature::gauss<double, 30>;

}  // namespace

double QuantileField::dVdx(double t, double x, double phi) const {
  constexpr double h = 1e-5;
  const double lo = chart() == Chart::kUnit ? 0.0 : -1.0;
  if (x - h < lo) return (V(t, x + h, phi) - V(t, x, phi)) / h;
  if (x + h > 1.0) return (V(t, x, phi) - V(t, x - h, phi)) / h;
  return (V(t, x + h, phi) - V(t, x - h, phi)) / (2.0 * h);
}

double QuantileField::R(double t, double x, double phi) const {
  if (phi <= 0.0) return 0.0;
  return -Gauss30::integrate([&](double psi) { return dVdx(t, x, psi); }, 0.0, phi);
}

double QuantileField::stream(double t, double x, double phi) const {
  if (phi <= 0.0) return 0.0;
  return Gauss30::integrate([&](double psi) { return V(t, x, psi); }, 0.0, phi);
}

double color_drift(const QuantileField& field, double t, double x, double phi) {
  if (phi <= 0.0) return 0.0;
  return -Gauss30::integrate([&](double psi) { return field.dVdx(t, x, psi); }, 0.0, phi);
}

namespace {

class ZeroField final : public QuantileField {
 public:
  double V(double, double, double) const override { return 0.0; }
  double dVdx(double, double, double) const override { return 0.0; }
  double R(double, double, double) const override { return 0.0; }
  double stream(double, double, double) const override { return 0.0; }
  bool time_independent() const override { return true; }
};

class SineSymmetricField final : public QuantileField {
 public:
  double V(double, double x, double phi) const override {
    const double c2 = 1.0 - x * x;
    return c2 > 0.0 ? kPi * std::sqrt(c2) * std::sin(kPi * (phi - 0.5)) : 0.0;
  }
  double dVdx(double, double x, double phi) const override {
    const double c2 = 1.0 - x * x;
    return c2 > 0.0 ? -kPi * x / std::sqrt(c2) * std::sin(kPi * (phi - 0.5)) : 0.0;
  }
  double R(double, double x, double phi) const override {
    if (phi <= 0.0 || phi >= 1.0) return 0.0;
    const double c2 = 1.0 - x * x;
    return c2 > 0.0 ? -x / std::sqrt(c2) * std::cos(kPi * (phi - 0.5)) : 0.0;
  }
  double stream(double, double x, double phi) const override {
    const double c2 = 1.0 - x * x;
    return c2 > 0.0 ? -std::sqrt(c2) * std::cos(kPi * (phi - 0.5)) : 0.0;
  }
  Chart chart() const override { return Chart::kSymmetric; }
  bool time_independent() const override { return true; }
};

class RescaledField final : public QuantileField {
 public:
  explicit RescaledField(FieldPtr base) : base_(std::move(base)) {}
  double V(double t, double x, double phi) const override { return 0.5 * base_->V(t, 2.0 * x - 1.0, phi); }
  double dVdx(double t, double x, double phi) const override { return base_->dVdx(t, 2.0 * x - 1.0, phi); }
  double R(double t, double x, double phi) const override { return base_->R(t, 2.0 * x - 1.0, phi); }
  double stream(double t, double x, double phi) const override {
    return 0.5 * base_->stream(t, 2.0 * x - 1.0, phi);
  }
  bool time_independent() const override { return base_->time_independent(); }
  std::vector<double> breakpoints(double t0, double t1) const override { return base_->breakpoints(t0, t1); }

 private:
  FieldPtr base_;
};

class FunctionField final : public QuantileField {
 public:
  FunctionField(std::function<double(double, double, double)> v,
                std::function<double(double, double, double)> dvdx, bool stationary)
      : v_(std::move(v)), dvdx_(std::move(dvdx)), stationary_(stationary) {}
  double V(double t, double x, double phi) const override { return v_(t, x, phi); }
  double dVdx(double t, double x, double phi) const override {
    return dvdx_ ? dvdx_(t, x, phi) : QuantileField::dVdx(t, x, phi);
  }
  bool time_independent() const override { return stationary_; }

 private:
  std::function<double(double, double, double)> v_, dvdx_;
  bool stationary_;
};

class SmoothedField final : public QuantileField {
 public:
  SmoothedField(FieldPtr base, double beta) : base_(std::move(base)), beta_(beta) {}

  double V(double t, double x, double phi) const override {
    if (interior(x)) return base_->V(t, x, phi);
    const Side s = side(x);
    return s.g * (base_->dVdx(t, s.anchor, phi) * (x - s.anchor) + base_->V(t, s.anchor, phi));
  }
  double dVdx(double t, double x, double phi) const override {
    if (interior(x)) return base_->dVdx(t, x, phi);
    const Side s = side(x);
    const double slope = base_->dVdx(t, s.anchor, phi);
    return s.dg * (slope * (x - s.anchor) + base_->V(t, s.anchor, phi)) + s.g * slope;
  }
  // With dF/dx = -R at the anchor, the stream of g * L is g * ((x - b)(-R(b)) + F(b)).
  double stream(double t, double x, double phi) const override {
    if (interior(x)) return base_->stream(t, x, phi);
    const Side s = side(x);
    return s.g * (-(x - s.anchor) * base_->R(t, s.anchor, phi) + base_->stream(t, s.anchor, phi));
  }
  double R(double t, double x, double phi) const override {
    if (phi <= 0.0 || phi >= 1.0) return 0.0;
    if (interior(x)) return base_->R(t, x, phi);
    const Side s = side(x);
    const double rb = base_->R(t, s.anchor, phi);
    return -s.dg * (-(x - s.anchor) * rb + base_->stream(t, s.anchor, phi)) + s.g * rb;
  }
  bool time_independent() const override { return base_->time_independent(); }
  std::vector<double> breakpoints(double t0, double t1) const override { return base_->breakpoints(t0, t1); }

 private:
  struct Side {
    double anchor;
    double g;
    double dg;
  };
  bool interior(double x) const { return x >= beta_ && x <= 1.0 - beta_; }
  Side side(double x) const {
    if (x < beta_) {
      const auto [f, df] = boundary_step(x, beta_);
      return {beta_, f, df};
    }
    const auto [f, df] = boundary_step(1.0 - x, beta_);
    return {1.0 - beta_, f, -df};
  }

  FieldPtr base_;
  double beta_;
};

class PiecewiseTimeField final : public QuantileField {
 public:
  PiecewiseTimeField(FieldPtr base, double delta, double horizon)
      : base_(std::move(base)), delta_(delta) {
    cells_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(horizon / delta * (1.0 + 1e-12))));
  }
  double V(double t, double x, double phi) const override { return base_->V(anchor(t), x, phi); }
  double dVdx(double t, double x, double phi) const override { return base_->dVdx(anchor(t), x, phi); }
  double R(double t, double x, double phi) const override { return base_->R(anchor(t), x, phi); }
  double stream(double t, double x, double phi) const override { return base_->stream(anchor(t), x, phi); }
  Chart chart() const override { return base_->chart(); }
  bool time_independent() const override { return base_->time_independent(); }
  std::vector<double> breakpoints(double t0, double t1) const override {
    std::vector<double> out;
    if (base_->time_independent()) return out;
    for (std::size_t k = 1; k < cells_; ++k) {
      const double tk = static_cast<double>(k) * delta_;
      if (tk > t0 && tk < t1) out.push_back(tk);
    }
    return out;
  }

 private:
  double anchor(double t) const { return static_cast<double>(time_cell(t, delta_, cells_)) * delta_; }

  FieldPtr base_;
  double delta_;
  std::size_t cells_;
};

class TabulatedField final : public QuantileField {
 public:
  TabulatedField(std::vector<double> ts, std::vector<double> xs, std::vector<double> ps,
                 std::vector<double> values)
      : ts_(std::move(ts)), xs_(std::move(xs)), ps_(std::move(ps)), v_(std::move(values)) {
    if (ts_.empty() || xs_.size() < 2 || ps_.size() < 2 ||
        v_.size() != ts_.size() * xs_.size() * ps_.size())
      throw Error("tabulated field lattice is incomplete");
    for (const auto* axis : {&ts_, &xs_, &ps_})
      if (!std::is_sorted(axis->begin(), axis->end()) ||
          std::adjacent_find(axis->begin(), axis->end()) != axis->end())
        throw Error("tabulated field axes must be strictly increasing");
  }

  double V(double t, double x, double phi) const override {
    const auto [it, wt] = locate(ts_, t);
    const auto [ix, wx] = locate(xs_, x);
    const auto [ip, wp] = locate(ps_, phi);
    double out = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double fa = ts_.size() == 1 ? (a == 0 ? 1.0 : 0.0) : (a ? wt : 1.0 - wt);
      if (fa == 0.0) continue;
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const double w = fa * (b ? wx : 1.0 - wx) * (c ? wp : 1.0 - wp);
          if (w != 0.0) out += w * at(std::min(it + a, ts_.size() - 1), ix + b, ip + c);
        }
    }
    return out;
  }
  bool time_independent() const override { return ts_.size() == 1; }

 private:
  static std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v) {
    if (axis.size() == 1 || v <= axis.front()) return {0, 0.0};
    if (v >= axis.back()) return {axis.size() - 2, 1.0};
    const auto k = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin()) - 1;
    return {k, (v - axis[k]) / (axis[k + 1] - axis[k])};
  }
  double at(std::size_t it, std::size_t ix, std::size_t ip) const {
    return v_[(it * xs_.size() + ix) * ps_.size() + ip];
  }

  std::vector<double> ts_, xs_, ps_, v_;
};

}  // namespace

std::pair<double, double> boundary_step(double x, double beta) {
  const double bp = beta / 4.0;
  const double a = beta - 2.0 * bp;
  if (x <= a) return {0.0, 0.0};
  if (x >= beta - bp) return {1.0, 0.0};
  const double s = (x - a) / bp;
  const double f = s * s * s * (s * (6.0 * s - 15.0) + 10.0);
  const double df = 30.0 * s * s * (s - 1.0) * (s - 1.0) / bp;
  return {f, df};
}

std::size_t time_cell(double t, double delta, std::size_t cells) {
  if (t <= 0.0) return 0;
  auto k = static_cast<std::size_t>(std::floor(t / delta));
  // Make the cell agree with the floating-point breakpoints k * delta.
  if (static_cast<double>(k + 1) * delta <= t) ++k;
  if (k > 0 && static_cast<double>(k) * delta > t) --k;
  return std::min(k, cells - 1);
}

FieldPtr zero_field() { return std::make_shared<ZeroField>(); }
FieldPtr sine_field_symmetric() { return std::make_shared<SineSymmetricField>(); }
FieldPtr sine_field() { return rescale_to_unit(sine_field_symmetric()); }

FieldPtr rescale_to_unit(FieldPtr symmetric) {
  if (symmetric->chart() != Chart::kSymmetric) throw Error("rescale_to_unit expects a [-1,1] field");
  return std::make_shared<RescaledField>(std::move(symmetric));
}

FieldPtr function_field(std::function<double(double, double, double)> v,
                        std::function<double(double, double, double)> dvdx, bool time_independent) {
  return std::make_shared<FunctionField>(std::move(v), std::move(dvdx), time_independent);
}

FieldPtr smooth_boundary(FieldPtr field, double beta) {
  if (!(beta > 0.0 && beta < 0.25)) throw Error("beta must lie in (0, 1/4)");
  if (field->chart() == Chart::kSymmetric) field = rescale_to_unit(std::move(field));
  return std::make_shared<SmoothedField>(std::move(field), beta);
}

FieldPtr piecewise_time(FieldPtr field, double delta, double horizon) {
  if (!(delta > 0.0)) throw Error("delta must be positive");
  if (!(delta <= horizon * (1.0 + 1e-12))) throw Error("delta must not exceed the horizon");
  return std::make_shared<PiecewiseTimeField>(std::move(field), delta, horizon);
}

FieldPtr tabulated_field(std::vector<double> ts, std::vector<double> xs, std::vector<double> phis,
                         std::vector<double> values) {
  return std::make_shared<TabulatedField>(std::move(ts), std::move(xs), std::move(phis), std::move(values));
}

FieldPtr tabulated_field_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open field table " + path);
  struct Row {
    double t, x, p, v;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Row r{};
    if (!(ss >> r.t >> r.x >> r.p >> r.v)) {
      if (rows.empty()) continue;  // header
      throw Error("malformed field table row: " + line);
    }
    rows.push_back(r);
  }
  auto axis = [&](auto get) {
    std::vector<double> a;
    for (const Row& r : rows) a.push_back(get(r));
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  };
  auto ts = axis([](const Row& r) { return r.t; });
  auto xs = axis([](const Row& r) { return r.x; });
  auto ps = axis([](const Row& r) { return r.p; });
  if (rows.size() != ts.size() * xs.size() * ps.size()) throw Error("field table is not a full lattice");
  std::vector<double> values(rows.size());
  auto index = [](const std::vector<double>& a, double v) {
    return static_cast<std::size_t>(std::lower_bound(a.begin(), a.end(), v) - a.begin());
  };
  for (const Row& r : rows)
    values[(index(ts, r.t) * xs.size() + index(xs, r.x)) * ps.size() + index(ps, r.p)] = r.v;
  return tabulated_field(std::move(ts), std::move(xs), std::move(ps), std::move(values));
}

FieldPtr make_field(const std::string& name) {
  if (name == "zero") return zero_field();
  if (name == "sine") return sine_field();
  if (name == "sine-symmetric") return sine_field_symmetric();
  if (name.rfind("csv:", 0) == 0) return tabulated_field_from_csv(name.substr(4));
  throw Error("unknown field '" + name + "'");
}

}  // namespace permuton_lab
