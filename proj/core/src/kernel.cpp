#include "fsad/kernel.hpp"

#include <cmath>

#include "fsad/error.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/special.hpp"
#include "refine.hpp"

namespace fsad {

namespace {
void check_attraction(double a) {
  if (!(a > 0.0)) throw DomainError("kernel: attraction strength a must be > 0");
}
}  // namespace

// With x = sqrt(a) s, y = sqrt(a) t and M the Mills ratio:
//   h(t, s) = [1 - x M(x)] + x M(y) exp(-(y^2 - x^2) / 2),
// both terms non-negative.
double eval_h(double t, double s, double a) {
  check_attraction(a);
  if (s < 0.0 || t < 0.0) throw DomainError("eval_h: times must be non-negative");
  if (t < s) return 0.0;
  if (t == s || s == 0.0) return 1.0;
  const double ra = std::sqrt(a);
  const double x = ra * s;
  const double y = ra * t;
  const double decay = std::exp(-0.5 * (y - x) * (y + x));
  return special::one_minus_x_mills(x) + x * special::mills_ratio(y) * decay;
}

double eval_h_limit(double s, double a) {
  check_attraction(a);
  if (s < 0.0) throw DomainError("eval_h_limit: time must be non-negative");
  return special::one_minus_x_mills(std::sqrt(a) * s);
}

double eval_h_dt(double t, double s, double a) {
  check_attraction(a);
  if (t < s) return 0.0;
  return -a * s * std::exp(-0.5 * a * (t - s) * (t + s));
}

double kernel_mean_integral(double t, double a) {
  if (t < 0.0) throw DomainError("kernel_mean_integral: negative time");
  if (a == 0.0) return t;
  check_attraction(a);
  return std::sqrt(special::kPi / (2.0 * a)) * std::erf(t * std::sqrt(0.5 * a));
}

double eval_h_or_unit(double t, double s, double a) {
  if (a == 0.0) return t >= s ? 1.0 : 0.0;
  return eval_h(t, s, a);
}

// Substituting s - m = rho^(1/alpha), alpha = 2H - 1, absorbs the singular factor:
//   w(s) = 2H int_0^{s^alpha} h(s, s - rho^(1/alpha)) d rho.
double eval_weight(double s, const ModelParams& params, const QuadratureSpec& quad) {
  params.require_attraction();
  if (s < 0.0 || s > params.T * (1.0 + 1e-12)) throw DomainError("eval_weight: s outside [0, T]");
  if (s == 0.0) return 0.0;
  const double H = params.H.value();
  const double alpha = 2.0 * H - 1.0;
  const double upper = std::pow(s, alpha);
  const double a = params.a;
  auto once = [&](const QuadratureSpec& q) {
    const quad::Rule gl = quad::gauss_legendre(q.order);
    const std::vector<double> edges = quad::power_graded_edges(q.cells_per_axis, q.grading);
    std::vector<double> parts(q.cells_per_axis);
    for (int c = 0; c < q.cells_per_axis; ++c) {
      const double lo = upper * edges[c];
      const double width = upper * (edges[c + 1] - edges[c]);
      double acc = 0.0;
      for (std::size_t k = 0; k < gl.size(); ++k) {
        const double rho = lo + width * gl.nodes[k];
        const double m = std::max(0.0, s - std::pow(rho, 1.0 / alpha));
        acc += gl.weights[k] * eval_h(s, m, a);
      }
      parts[c] = acc * width;
    }
    return 2.0 * H * quad::pairwise_sum(parts);
  };
  return detail::converge(quad, once, "eval_weight");
}

KernelDifference::KernelDifference(double upper, double lower, const ModelParams& p)
    : t_upper(upper), t_lower(lower), params(p) {
  if (!(0.0 <= lower && lower <= upper)) throw DomainError("KernelDifference requires 0 <= t_lower <= t_upper");
}

double KernelDifference::operator()(double u) const {
  double v = 0.0;
  if (u > 0.0 && u <= t_upper) v += eval_h(t_upper, u, params.a);
  if (u > 0.0 && u <= t_lower) v -= eval_h(t_lower, u, params.a);
  return v;
}

double eval_kernel_difference(const KernelDifference& g, double u) { return g(u); }

WeightTable WeightTable::build(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad) {
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = eval_weight(grid[i], params, quad);
  return WeightTable(grid, std::move(w), params);
}

}  // namespace fsad
