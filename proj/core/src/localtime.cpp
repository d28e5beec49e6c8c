#include "fsad/localtime.hpp"

#include <algorithm>
#include <cmath>

#include "fsad/error.hpp"
#include "fsad/gram.hpp"
#include "fsad/io.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/special.hpp"
#include "fsad/stats.hpp"
#include "refine.hpp"

namespace fsad {

double bandwidth_guard(const std::vector<DiffusionPath>& paths, double t, int dim) {
  if (paths.empty()) throw DomainError("bandwidth_guard: no paths");
  const TimeGrid& grid = *paths.front().grid;
  std::vector<double> sq;
  for (const DiffusionPath& p : paths) {
    const std::vector<double>& x = p.values[static_cast<std::size_t>(dim)];
    for (std::size_t k = 0; k + 1 < grid.size() && grid[k] < t; ++k) {
      const double d = x[k + 1] - x[k];
      sq.push_back(d * d);
    }
  }
  if (sq.empty()) return 0.0;
  return 2.0 * std::sqrt(quad::pairwise_sum(sq) / static_cast<double>(sq.size()));
}

double occupation(const TimeGrid& grid, std::span<const double> values, double x, double t, double bandwidth,
                  std::span<const double> weights) {
  if (!(bandwidth > 0.0)) throw DomainError("occupation: bandwidth must be positive");
  if (values.size() != grid.size()) throw DomainError("occupation: path does not match grid");
  if (!weights.empty() && weights.size() != grid.size()) throw DomainError("occupation: weights do not match grid");
  const double lo = x - bandwidth;
  const double hi = x + bandwidth;
  std::vector<double> parts;
  for (std::size_t k = 0; k + 1 < grid.size() && grid[k] < t; ++k) {
    const double dt = grid[k + 1] - grid[k];
    const double end = std::min(1.0, (t - grid[k]) / dt);
    const double x0 = values[k];
    const double dx = values[k + 1] - x0;
    // Fraction u of the step with lo <= x0 + u dx <= hi.
    double u0 = 0.0, u1 = end;
    if (dx == 0.0) {
      if (x0 < lo || x0 > hi) continue;
    } else {
      double a = (lo - x0) / dx;
      double b = (hi - x0) / dx;
      if (a > b) std::swap(a, b);
      u0 = std::max(u0, a);
      u1 = std::min(u1, b);
      if (u1 <= u0) continue;
    }
    if (weights.empty()) {
      parts.push_back((u1 - u0) * dt);
    } else {
      const double w0 = weights[k];
      const double dw = weights[k + 1] - w0;
      parts.push_back(dt * ((u1 - u0) * w0 + 0.5 * dw * (u1 * u1 - u0 * u0)));
    }
  }
  return quad::pairwise_sum(parts) / (2.0 * bandwidth);
}

std::vector<double> local_time_samples(const std::vector<DiffusionPath>& paths, double x, double t, double bandwidth,
                                       std::span<const double> weights, int dim) {
  if (paths.empty()) throw DomainError("local time: no paths");
  paths.front().params.require_centered();
  const double guard = bandwidth_guard(paths, t, dim);
  if (bandwidth < guard) {
    throw ResolutionError("bandwidth " + io::format_double(bandwidth) + " is below the resolution guard " +
                          io::format_double(guard) + " (twice the RMS step displacement)");
  }
  std::vector<double> out(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    out[p] = occupation(*paths[p].grid, paths[p].values[static_cast<std::size_t>(dim)], x, t, bandwidth, weights);
  }
  return out;
}

namespace {
LocalTimeEstimate summarize_estimate(const std::vector<double>& samples, double x, double t, double bandwidth) {
  const stats::Summary s = stats::summarize(samples);
  return LocalTimeEstimate{x, t, s.mean, bandwidth, s.n, s.se_mean};
}
}  // namespace

LocalTimeEstimate estimate_local_time(const std::vector<DiffusionPath>& paths, double x, double t, double bandwidth,
                                      int dim) {
  return summarize_estimate(local_time_samples(paths, x, t, bandwidth, {}, dim), x, t, bandwidth);
}

LocalTimeEstimate estimate_weighted_local_time(const std::vector<DiffusionPath>& paths, double x, double t,
                                               double bandwidth, const WeightTable& weights, int dim) {
  if (paths.empty()) throw DomainError("local time: no paths");
  const TimeGrid& grid = *paths.front().grid;
  if (weights.grid().size() != grid.size()) throw DomainError("weight table grid differs from the path grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::abs(weights.grid()[k] - grid[k]) > 1e-12 * std::max(1.0, grid[k])) {
      throw DomainError("weight table grid differs from the path grid");
    }
  }
  return summarize_estimate(local_time_samples(paths, x, t, bandwidth, weights.weights(), dim), x, t, bandwidth);
}

namespace {

// sigma_s^2, the weight and the drift covariance at one time, sharing one stretched mesh.
class PointwiseMoments {
 public:
  PointwiseMoments(const ModelParams& params, const QuadratureSpec& quad)
      : params_(params), quad_(quad), gram_(params.H, quad.cells_per_axis, quad.order) {}

  double variance(double s) const {
    if (s <= 0.0) return 0.0;
    if (params_.a == 0.0) return std::pow(s, 2.0 * params_.H.value());
    auto h = [&](double u) { return eval_h(s, u, params_.a); };
    return gram_.bilinear(s, h, h);
  }

  double weight(double s) const {
    if (s <= 0.0) return 0.0;
    const double H = params_.H.value();
    if (params_.a == 0.0) return 2.0 * H * std::pow(s, 2.0 * H - 1.0);
    ModelParams p = params_;
    p.T = std::max(p.T, s);
    QuadratureSpec q = quad_;
    q.max_refinements = 0;
    return eval_weight(s, p, q);
  }

  // k_s(v) = s h(s, v) - int_v^s h(u, v) du = v exp(-a (s^2 - v^2) / 2).
  double drift_cov(double s) const {
    if (s <= 0.0) return 0.0;
    const double a = params_.a;
    auto h = [&](double u) { return eval_h_or_unit(s, u, a); };
    auto k = [&](double v) { return v * std::exp(-0.5 * a * (s - v) * (s + v)); };
    return gram_.bilinear(s, h, k);
  }

 private:
  ModelParams params_;
  QuadratureSpec quad_;
  UnitGram gram_;
};

void check_time(double t, const ModelParams& params) {
  params.validate();
  params.require_centered();
  if (t < 0.0 || t > params.T * (1.0 + 1e-12)) throw DomainError("time outside [0, T]");
}

// int_0^t f(s) ds for f ~ s^(kappa - 1) near 0, refined until stable.
template <class Integrand>
double time_integral(double t, double kappa, const ModelParams& params, const QuadratureSpec& quad,
                     Integrand&& integrand, const char* what) {
  if (t == 0.0) return 0.0;
  auto once = [&](const QuadratureSpec& q) {
    const PointwiseMoments m(params, q);
    return quad::integrate_power_map([&](double s) { return integrand(m, s); }, t, kappa, q.cells_per_axis,
                                     q.order, q.grading);
  };
  return detail::converge(quad, once, what);
}

}  // namespace

double analytic_mean_local_time(double t, double x, const ModelParams& params, const QuadratureSpec& quad) {
  check_time(t, params);
  const double z = params.z;
  return time_integral(
      t, 1.0 - params.H.value(), params, quad,
      [&](const PointwiseMoments& m, double s) { return special::gaussian_density(x, z, m.variance(s)); },
      "analytic_mean_local_time");
}

double analytic_mean_weighted_local_time(double t, double x, const ModelParams& params, const QuadratureSpec& quad) {
  check_time(t, params);
  const double z = params.z;
  return time_integral(
      t, params.H.value(), params, quad,
      [&](const PointwiseMoments& m, double s) {
        return m.weight(s) * special::gaussian_density(x, z, m.variance(s));
      },
      "analytic_mean_weighted_local_time");
}

double drift_covariance(double s, const ModelParams& params, const QuadratureSpec& quad) {
  check_time(s, params);
  auto once = [&](const QuadratureSpec& q) { return PointwiseMoments(params, q).drift_cov(s); };
  return detail::converge(quad, once, "drift_covariance");
}

TanakaTerms tanaka_terms(double t, double x, const ModelParams& params, const QuadratureSpec& quad) {
  check_time(t, params);
  TanakaTerms r;
  r.t = t;
  r.x = x;
  const double z = params.z;
  r.initial = std::abs(z - x);
  if (t == 0.0) {
    r.e_abs = r.initial;
    return r;
  }
  const double var_t = detail::converge(
      quad, [&](const QuadratureSpec& q) { return PointwiseMoments(params, q).variance(t); }, "tanaka variance");
  r.e_abs = special::folded_normal_mean(x, z, var_t);
  if (params.a > 0.0) {
    const double integral = time_integral(
        t, 1.0, params, quad,
        [&](const PointwiseMoments& m, double s) {
          return special::gaussian_density(x, z, m.variance(s)) * m.drift_cov(s);
        },
        "tanaka drift term");
    r.drift_term = -2.0 * params.a * integral;
  }
  r.e_weighted_lt = analytic_mean_weighted_local_time(t, x, params, quad);
  r.residual = r.e_abs - r.initial - r.drift_term - r.e_weighted_lt;
  return r;
}

double tanaka_expectation_residual(double t, double x, const ModelParams& params, const QuadratureSpec& quad) {
  return tanaka_terms(t, x, params, quad).residual;
}

void write_local_time_csv(const std::filesystem::path& path, const std::vector<LocalTimeRow>& rows) {
  io::CsvWriter csv(path, {"x", "t", "bandwidth", "estimate", "se", "analytic_mean"});
  for (const LocalTimeRow& r : rows) csv.row({r.x, r.t, r.bandwidth, r.estimate, r.se, r.analytic_mean});
}

void write_tanaka_csv(const std::filesystem::path& path, const std::vector<TanakaTerms>& rows) {
  io::CsvWriter csv(path, {"t", "x", "E_abs", "drift_term", "E_weighted_lt", "residual"});
  for (const TanakaTerms& r : rows) csv.row({r.t, r.x, r.e_abs, r.drift_term, r.e_weighted_lt, r.residual});
}

}  // namespace fsad
