#include "permuton_lab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "permuton_lab/core.hpp"

namespace permuton_lab {

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(data, h) + pairwise_sum(data + h, n - h);
}

double pairwise_sum(const std::vector<double>& data) { return pairwise_sum(data.data(), data.size()); }

MeanEstimate mean_and_stderr(const std::vector<double>& xs) {
  MeanEstimate out;
  out.n = xs.size();
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  out.mean = pairwise_sum(xs) / n;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
  if (xs.size() > 1) out.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return out;
}

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  std::vector<double> e(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) e[i] = std::exp(xs[i] - m);
  return m + std::log(pairwise_sum(e));
}

MeanEstimate log_mean_exp(const std::vector<double>& log_w) {
  MeanEstimate out;
  out.n = log_w.size();
  if (log_w.empty()) {
    out.mean = -std::numeric_limits<double>::infinity();
    return out;
  }
  double m = -std::numeric_limits<double>::infinity();
  for (double x : log_w) m = std::max(m, x);
  if (!std::isfinite(m)) {
    out.mean = -std::numeric_limits<double>::infinity();
    out.std_error = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<double> scaled(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i) scaled[i] = std::exp(log_w[i] - m);
  const MeanEstimate s = mean_and_stderr(scaled);
  out.mean = m + std::log(s.mean);
  out.std_error = s.std_error / s.mean;
  return out;
}

double ks_uniform(std::vector<double> sample, double lo, double hi) {
  if (sample.empty()) throw Error("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = std::clamp((sample[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

ChiSquareResult chi_square_uniform(const std::vector<double>& counts) {
  if (counts.size() < 2) throw Error("chi-square needs at least two cells");
  double total = 0.0;
  for (double c : counts) total += c;
  const double expected = total / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = static_cast<double>(counts.size() - 1);
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

ChiSquareResult chi_square_uniform_2d(const std::vector<double>& xs, const std::vector<double>& ys,
                                      std::size_t bins) {
  if (xs.size() != ys.size()) throw Error("coordinate arrays differ in length");
  std::vector<double> counts(bins * bins, 0.0);
  const double b = static_cast<double>(bins);
  auto cell = [&](double c) {
    return static_cast<std::size_t>(std::clamp(std::floor(c * b), 0.0, b - 1.0));
  };
  for (std::size_t i = 0; i < xs.size(); ++i) counts[cell(xs[i]) * bins + cell(ys[i])] += 1.0;
  return chi_square_uniform(counts);
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw Error("median of an empty sample");
  const std::size_t h = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(h), xs.end());
  const double upper = xs[h];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lower + upper);
}

}  // namespace permuton_lab
