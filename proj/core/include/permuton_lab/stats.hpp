#pragma once

#include <cstddef>
#include <vector>

namespace permuton_lab {

/// Pairwise (cascade) summation; result depends only on element order.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& data);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error of the mean.
MeanEstimate mean_and_stderr(const std::vector<double>& xs);

/// Mean of exp(log_w) computed in log space.  `std_error` is the standard error
/// of log(mean) by the delta method; `mean` is the log of the sample mean.
MeanEstimate log_mean_exp(const std::vector<double>& log_w);

double log_sum_exp(const std::vector<double>& xs);

/// Kolmogorov-Smirnov distance between the sample and Uniform[lo, hi].
double ks_uniform(std::vector<double> sample, double lo = 0.0, double hi = 1.0);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed counts against equal expected counts.
ChiSquareResult chi_square_uniform(const std::vector<double>& counts);

/// Counts on a bins x bins grid over [0,1]^2 tested against uniformity.
ChiSquareResult chi_square_uniform_2d(const std::vector<double>& xs, const std::vector<double>& ys,
                                      std::size_t bins = 10);

double median(std::vector<double> xs);

}  // namespace permuton_lab
