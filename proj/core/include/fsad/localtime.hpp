#pragma once

#include <filesystem>
#include <vector>

#include "fsad/kernel.hpp"
#include "fsad/params.hpp"
#include "fsad/simulate.hpp"

namespace fsad {

struct LocalTimeEstimate {
  double x = 0.0;
  double t = 0.0;
  double value = 0.0;
  double bandwidth = 0.0;
  std::size_t n_paths = 0;
  double standard_error = 0.0;
};

/// Twice the root-mean-square step displacement over (0, t]; the smallest bandwidth accepted.
double bandwidth_guard(const std::vector<DiffusionPath>& paths, double t, int dim = 0);

/// (1 / 2 eps) int_0^t w(s) 1{|X_s - x| <= eps} ds along the linear interpolant of one
/// path; `weights` holds w at the grid points, or is empty for w = 1.
double occupation(const TimeGrid& grid, std::span<const double> values, double x, double t, double bandwidth,
                  std::span<const double> weights = {});

LocalTimeEstimate estimate_local_time(const std::vector<DiffusionPath>& paths, double x, double t, double bandwidth,
                                      int dim = 0);
LocalTimeEstimate estimate_weighted_local_time(const std::vector<DiffusionPath>& paths, double x, double t,
                                               double bandwidth, const WeightTable& weights, int dim = 0);

/// Per-path values of the estimator, for second-moment studies.
std::vector<double> local_time_samples(const std::vector<DiffusionPath>& paths, double x, double t,
                                       double bandwidth, std::span<const double> weights = {}, int dim = 0);

/// int_0^t rho(x; z, sigma_s^2) ds.
double analytic_mean_local_time(double t, double x, const ModelParams& params, const QuadratureSpec& quad);
/// int_0^t w(s) rho(x; z, sigma_s^2) ds.
double analytic_mean_weighted_local_time(double t, double x, const ModelParams& params, const QuadratureSpec& quad);

/// Cov(X_s, int_0^s (X_s - X_u) du), i.e. int_0^s (sigma_s^2 - Cov(X_s, X_u)) du.
double drift_covariance(double s, const ModelParams& params, const QuadratureSpec& quad);

/// Terms of |X_t - x| = |z - x| + drift + martingale + weighted local time, in expectation.
struct TanakaTerms {
  double t = 0.0;
  double x = 0.0;
  double e_abs = 0.0;        ///< E|X_t - x|
  double initial = 0.0;      ///< |z - x|
  double drift_term = 0.0;   ///< -2a int_0^t rho(x; z, sigma_s^2) drift_covariance(s) ds
  double e_weighted_lt = 0.0;
  double residual = 0.0;
};

TanakaTerms tanaka_terms(double t, double x, const ModelParams& params, const QuadratureSpec& quad);
double tanaka_expectation_residual(double t, double x, const ModelParams& params, const QuadratureSpec& quad);

struct LocalTimeRow {
  double x, t, bandwidth, estimate, se, analytic_mean;
};

/// Header `x,t,bandwidth,estimate,se,analytic_mean`.
void write_local_time_csv(const std::filesystem::path& path, const std::vector<LocalTimeRow>& rows);
/// Header `t,x,E_abs,drift_term,E_weighted_lt,residual`.
void write_tanaka_csv(const std::filesystem::path& path, const std::vector<TanakaTerms>& rows);

}  // namespace fsad
