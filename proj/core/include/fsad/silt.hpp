#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fsad/gram.hpp"
#include "fsad/params.hpp"
#include "fsad/simulate.hpp"

namespace fsad {

/// p_eps(x) = exp(-|x|^2 / (2 eps)) / (2 pi eps) on the plane.
double heat_kernel(std::array<double, 2> x, double epsilon);
/// The same kernel from its Fourier integral (2 pi)^-2 int exp(i xi.x - eps |xi|^2 / 2) d xi.
double heat_kernel_fourier(std::array<double, 2> x, double epsilon);

struct SiltEstimate {
  double epsilon = 0.0;
  double mc_mean = 0.0;
  double mc_var = 0.0;
  double mc_se = 0.0;      ///< standard error of mc_mean
  double mc_var_se = 0.0;  ///< standard error of mc_var
  double analytic_mean = 0.0;
  double analytic_var = 0.0;
  std::size_t n_paths = 0;
  std::size_t steps = 0;
};

/// Largest mean squared planar step |X_{k+1} - X_k|^2 over the grid.
double silt_step_guard(const std::vector<DiffusionPath>& paths);

/// Monte Carlo estimate of the mean and variance of
/// beta = sum_{j < i} p_eps(X_{t_i} - X_{t_j}) dt^2, one entry per epsilon.
std::vector<SiltEstimate> estimate_beta_mc(const std::vector<DiffusionPath>& paths,
                                           std::span<const double> epsilons, int threads = 1);

/// (1 / 2 pi) int_0^T int_0^t (eps + sigma^2_{t,s})^-1 ds dt. The outer time and the
/// inner lag use graded Gauss-Legendre; covariances come from one table per outer node.
/// Accuracy floor is about 1e-6 relative at small eps, so rel_tol below that is raised to it.
double analytic_mean_beta(double epsilon, const ModelParams& params, const QuadratureSpec& quad);
std::vector<double> analytic_mean_beta(std::span<const double> epsilons, const ModelParams& params,
                                       const QuadratureSpec& quad, int threads = 1);

/// Covariances on the uniform grid t_k = k T / n; the node set of every
/// triangle rule and tuple sweep in this module.
class SiltGrid {
 public:
  SiltGrid(const ModelParams& params, std::size_t steps, const QuadratureSpec& quad);

  std::size_t steps() const noexcept { return steps_; }
  double time(std::size_t k) const noexcept { return params_.T * static_cast<double>(k) / static_cast<double>(steps_); }
  const ModelParams& params() const noexcept { return params_; }
  const CovarianceTable& table() const noexcept { return table_; }

  /// sigma^2_{t_k, t_j}.
  double sigma2(std::size_t k, std::size_t j) const { return table_.increment_variance(k, j); }
  /// Cov(X_{t_k} - X_{t_j}, X_{t_kp} - X_{t_jp}).
  double mu(std::size_t j, std::size_t k, std::size_t jp, std::size_t kp) const {
    return table_.increment_cov(k, j, kp, jp);
  }
  double d_H(std::size_t j, std::size_t k, std::size_t jp, std::size_t kp) const;

  struct Moments {
    double epsilon = 0.0;
    double mean = 0.0;    ///< E beta
    double second = 0.0;  ///< E beta^2
    double var = 0.0;     ///< Var beta, integrated directly from its non-negative integrand
  };

  /// Piecewise-linear triangle rule on every `stride`-th node, all epsilons in one pass.
  std::vector<Moments> moments(std::span<const double> epsilons, std::size_t stride = 1, int threads = 1) const;

 private:
  ModelParams params_;
  std::size_t steps_;
  CovarianceTable table_;
};

struct VarianceEstimate {
  double epsilon = 0.0;
  double value = 0.0;
  double indicator = 0.0;  ///< difference to the half-resolution rule
};

/// Var(beta^eps) = (2 pi)^-2 int mu^2 / [((A B - mu^2) A B)], A = sigma^2_{t,s} + eps,
/// B = sigma^2_{t',s'} + eps, over pairs of time pairs. Throws NumericError when the
/// half-resolution difference exceeds rel_tol times the value.
std::vector<VarianceEstimate> analytic_var_beta(std::span<const double> epsilons, const SiltGrid& grid,
                                                int threads = 1, double rel_tol = 1e-2);
double analytic_var_beta(double epsilon, const ModelParams& params, const QuadratureSpec& quad,
                         std::size_t steps = 128, double rel_tol = 1e-2);

struct ConvergenceRow {
  double epsilon = 0.0;
  double analytic_var = 0.0;
  double delta_prev = 0.0;  ///< |Var(eps) - Var(previous eps)|, 0 on the first row
  double indicator = 0.0;
};

std::vector<ConvergenceRow> convergence_study(std::span<const double> epsilon_seq, const ModelParams& params,
                                              const QuadratureSpec& quad, std::size_t steps = 128, int threads = 1,
                                              double rel_tol = 1e-2);

/// [h(y,u) 1_(0,y](u) - h(x,u) 1_(0,x](u)] [same in v].
double hstar(double y, double x, double u, double v, const ModelParams& params);

/// Grid indices of an ordered tuple; unused entries are 0.
struct Tuple {
  std::size_t s = 0, t = 0, sp = 0, tp = 0;
};

enum class OrderingCase { interleaved, nested, disjoint };  ///< s<s'<t<t', s'<s<t<t', s<t<s'<t'

/// `count` random strictly ordered tuples of grid indices for one case.
std::vector<Tuple> sample_tuples(std::size_t steps, std::size_t count, OrderingCase c, std::uint64_t seed);

struct KappaReport {
  double min_ratio = 0.0;  ///< min of d_H over the lower-bound bracket
  Tuple argmin;
  std::size_t n = 0;
};

/// d_H against its lower-bound bracket in products of (t - s)^(2H) for one ordering.
KappaReport dh_lower_bound_check(const SiltGrid& grid, std::span<const Tuple> tuples, OrderingCase c);

struct RatioReport {
  double max_ratio = 0.0;  ///< fitted constant: max LHS / RHS
  double min_ratio = 0.0;
  std::size_t violations = 0;  ///< RHS <= 0 while LHS exceeds the tolerance
  std::size_t n = 0;
};

/// sigma^2_{tp,s} - sigma^2_{tp,t} against (tp - s)^(2H) - (tp - t)^(2H).
/// Reads s, t and tp of each tuple; needs s < t <= tp.
RatioReport variance_shift_check(const SiltGrid& grid, std::span<const Tuple> tuples, double abs_tol = 1e-13);
/// 2 mu against the matching bracket of four (.)^(2H) terms; tuples with s < t <= s' < t'.
RatioReport covariance_shift_check(const SiltGrid& grid, std::span<const Tuple> tuples, double abs_tol = 1e-13);

/// Header `epsilon,mc_mean,mc_se,analytic_mean,mc_var,analytic_var,n_paths,steps`.
void write_silt_csv(const std::filesystem::path& path, const std::vector<SiltEstimate>& rows);
/// Header `epsilon,analytic_var,delta_prev`.
void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows);

}  // namespace fsad
