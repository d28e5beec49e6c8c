#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fsad::stats {

struct Summary {
  double mean = 0.0;
  double var = 0.0;      ///< unbiased sample variance
  double se_mean = 0.0;  ///< sqrt(var / n)
  double se_var = 0.0;   ///< sqrt((m4 - var^2) / n)
  std::size_t n = 0;
};

/// Order-fixed summary; the result does not depend on how the sample was produced.
Summary summarize(std::span<const double> x);

/// Sample covariance and its standard error sqrt(Var((x - mx)(y - my)) / n).
struct CovEstimate {
  double cov = 0.0;
  double se = 0.0;
};
CovEstimate covariance(std::span<const double> x, std::span<const double> y);

/// Kolmogorov-Smirnov statistics.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

/// 1% critical values (asymptotic, c(0.01) = 1.628).
double ks_critical_two_sample(std::size_t n, std::size_t m);
double ks_critical_one_sample(std::size_t n);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace fsad::stats
