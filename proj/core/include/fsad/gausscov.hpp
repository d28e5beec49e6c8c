#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "fsad/gram.hpp"
#include "fsad/params.hpp"

namespace fsad {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// phi(u, v) = H(2H-1)|u - v|^(2H-2); throws DomainError on the diagonal.
double phi(double u, double v, const HurstIndex& H);

enum class MomentDegree { k00, k10, k01, k11 };

/// Exact int_U int_V u^p v^q phi(u, v) du dv for p, q in {0, 1}.
double cell_moment(Interval u_range, Interval v_range, const HurstIndex& H, MomentDegree degree);

/// int int f(u) g(v) phi(u, v) over u_domain x v_domain. f and g may have kinks
/// or jumps only at domain ends and at `breakpoints`.
double weighted_double_integral(const std::function<double(double)>& f,
                                const std::function<double(double)>& g, Interval u_domain,
                                Interval v_domain, const HurstIndex& H, const QuadratureSpec& quad,
                                std::span<const double> breakpoints = {});

double sigma2(double t, const ModelParams& params, const QuadratureSpec& quad);
/// Variance of X_t - X_s for s <= t.
double sigma2_increment(double t, double s, const ModelParams& params, const QuadratureSpec& quad);
double cross_cov(double t, double s, const ModelParams& params, const QuadratureSpec& quad);
/// Cov(X_t - X_s, X_tp - X_sp).
double mu_pair(double s, double t, double sp, double tp, const ModelParams& params,
               const QuadratureSpec& quad);
/// sigma^2_{t,s} sigma^2_{tp,sp} - mu^2, clipped at 0 inside the tolerance.
double dH(double s, double t, double sp, double tp, const ModelParams& params, const QuadratureSpec& quad);

/// Reported instead of a boolean so that the slack is visible.
struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< rhs - lhs
  bool holds() const noexcept { return margin >= 0.0; }
};

BoundCheck make_bound(double lhs, double rhs);

struct GapEstimate {
  double value = 0.0;       ///< E|X_t - X_inf|^2 with the kernel truncated at tail_cut
  double tail_bound = 0.0;  ///< bound on the neglected part beyond tail_cut
};

/// Mean-square distance between X_t and its limit.
GapEstimate l2_gap(double t, const ModelParams& params, const QuadratureSpec& quad, double tail_cut);
/// E|int_0^t (h(t,s) - h(s)) dB|^2 against 2H / (a t^(2-2H)).
BoundCheck l2_stochastic_bound(double t, const ModelParams& params, const QuadratureSpec& quad);
/// |int_0^t (h(t,s) - h(s)) ds| against 1 / (a t).
BoundCheck l2_deterministic_bound(double t, const ModelParams& params, const QuadratureSpec& quad);

struct LndResult {
  double exact = 0.0;          ///< smallest generalized eigenvalue
  double random_search = 0.0;  ///< minimum over random coefficient vectors
};

/// min_u Var(sum u_j dX_j) / sum u_j^2 Var(dX_j) over the increments of a grid.
LndResult lnd_ratio(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad,
                    int n_trials, std::uint64_t seed);

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
};

/// Range of sigma^2_{t,s} / (t - s)^(2H) over all pairs of an n-point uniform grid on [0, T].
RatioRange increment_ratio_range(const ModelParams& params, const QuadratureSpec& quad, std::size_t n);

/// Second-order structure on a grid.
class CovarianceReport {
 public:
  CovarianceReport(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad);

  const TimeGrid& grid() const noexcept { return grid_; }
  const ModelParams& params() const noexcept { return params_; }
  const std::vector<double>& sigma2_t() const noexcept { return sigma2_t_; }
  const Eigen::MatrixXd& sigma2_incr() const noexcept { return sigma2_incr_; }
  const Eigen::MatrixXd& cross_cov() const noexcept { return table_.cov(); }
  /// Indices into the grid.
  double mu(std::size_t s, std::size_t t, std::size_t sp, std::size_t tp) const;
  double d_H(std::size_t s, std::size_t t, std::size_t sp, std::size_t tp) const;

  /// Header `t,s,sigma2_t,sigma2_incr,cross_cov`, one row per pair s <= t.
  void write_csv(const std::filesystem::path& path) const;

 private:
  TimeGrid grid_;
  ModelParams params_;
  CovarianceTable table_;
  std::vector<double> sigma2_t_;
  Eigen::MatrixXd sigma2_incr_;
};

struct DhRow {
  double s, t, sp, tp, mu, dH;
};

/// Header `s,t,sp,tp,mu,dH`.
void write_dh_csv(const std::filesystem::path& path, const std::vector<DhRow>& rows);

}  // namespace fsad
