#pragma once

#include <vector>

#include "fsad/params.hpp"

namespace fsad {

/// h(t, s) = 1 - a s e^{a s^2/2} int_s^t e^{-a u^2/2} du for t >= s, 0 for t < s.
/// Evaluated through Mills ratios so that no intermediate overflows.
double eval_h(double t, double s, double a);

/// h(s) = lim_{t -> inf} h(t, s), in (0, 1].
double eval_h_limit(double s, double a);

/// d/dt h(t, s) = -a s exp(-a (t^2 - s^2) / 2) for t >= s.
double eval_h_dt(double t, double s, double a);

/// int_0^t h(t, s) ds = int_0^t e^{-a u^2/2} du.
double kernel_mean_integral(double t, double a);

/// Same kernel but a == 0 gives the fBm reduction h == 1 on t >= s.
double eval_h_or_unit(double t, double s, double a);

/// w(s) = 2H(2H-1) int_0^s h(s, m) (s - m)^{2H-2} dm.
double eval_weight(double s, const ModelParams& params, const QuadratureSpec& quad);

/// g(u) = h(t_upper, u) 1_(0, t_upper](u) - h(t_lower, u) 1_(0, t_lower](u).
struct KernelDifference {
  double t_upper = 0.0;
  double t_lower = 0.0;
  ModelParams params;

  KernelDifference(double upper, double lower, const ModelParams& p);
  double operator()(double u) const;
};

double eval_kernel_difference(const KernelDifference& g, double u);

/// w(s) tabulated on a grid; immutable after construction.
class WeightTable {
 public:
  static WeightTable build(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad);

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const ModelParams& params() const noexcept { return params_; }

 private:
  WeightTable(TimeGrid grid, std::vector<double> w, ModelParams p)
      : grid_(std::move(grid)), weights_(std::move(w)), params_(p) {}

  TimeGrid grid_;
  std::vector<double> weights_;
  ModelParams params_;
};

}  // namespace fsad
