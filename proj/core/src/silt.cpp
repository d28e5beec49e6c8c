#include "fsad/silt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fsad/error.hpp"
#include "fsad/io.hpp"
#include "fsad/kernel.hpp"
#include "fsad/parallel.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/rng.hpp"
#include "fsad/special.hpp"
#include "fsad/stats.hpp"

namespace fsad {

using io::CsvWriter;
using io::format_double;
using special::kPi;

namespace {

void require_epsilon(double epsilon, const char* where) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainError(std::string(where) + ": epsilon must be positive and finite");
  }
}

double pow2h(double x, double two_h) { return x <= 0.0 ? 0.0 : std::pow(x, two_h); }

// (1/pi) int_0^inf cos(xi x) exp(-eps xi^2 / 2) d xi, truncated where the Gaussian is below 1e-20.
double fourier_factor(double x, double epsilon) {
  const double cut = std::sqrt(2.0 * 46.0 / epsilon);
  const int cells = 8 + 2 * static_cast<int>(std::ceil(cut * std::abs(x) / kPi));
  const double value = quad::integrate(
      [&](double xi) { return std::cos(xi * x) * std::exp(-0.5 * epsilon * xi * xi); }, 0.0, cut, cells, 16);
  return value / kPi;
}

}  // namespace

double heat_kernel(std::array<double, 2> x, double epsilon) {
  require_epsilon(epsilon, "heat_kernel");
  const double r2 = x[0] * x[0] + x[1] * x[1];
  return std::exp(-r2 / (2.0 * epsilon)) / (2.0 * kPi * epsilon);
}

double heat_kernel_fourier(std::array<double, 2> x, double epsilon) {
  require_epsilon(epsilon, "heat_kernel_fourier");
  return fourier_factor(x[0], epsilon) * fourier_factor(x[1], epsilon);
}

double silt_step_guard(const std::vector<DiffusionPath>& paths) {
  if (paths.empty()) throw DomainError("silt_step_guard: no paths");
  const std::size_t n = paths.front().grid->size();
  double worst = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double acc = 0.0;
    for (const auto& p : paths) {
      for (const auto& coord : p.values) {
        const double dx = coord[k] - coord[k - 1];
        acc += dx * dx;
      }
    }
    worst = std::max(worst, acc / static_cast<double>(paths.size()));
  }
  return worst;
}

std::vector<SiltEstimate> estimate_beta_mc(const std::vector<DiffusionPath>& paths,
                                           std::span<const double> epsilons, int threads) {
  if (paths.empty()) throw DomainError("estimate_beta_mc: no paths");
  if (epsilons.empty()) throw DomainError("estimate_beta_mc: no epsilon");
  const auto& grid = *paths.front().grid;
  for (const auto& p : paths) {
    if (p.values.size() != 2) throw DomainError("estimate_beta_mc: paths must be two-dimensional");
    if (p.params.nu != 0.0) throw DomainError("estimate_beta_mc: requires nu = 0");
    if (p.grid->size() != grid.size()) throw DomainError("estimate_beta_mc: paths on different grids");
  }
  if (!grid.is_uniform()) throw DomainError("estimate_beta_mc: grid must be uniform");
  const double guard = 4.0 * silt_step_guard(paths);
  for (double eps : epsilons) {
    require_epsilon(eps, "estimate_beta_mc");
    if (eps < guard) {
      throw ResolutionError("estimate_beta_mc: epsilon " + format_double(eps) +
                            " is below 4 x mean squared step " + format_double(guard) + "; refine the grid");
    }
  }

  const std::size_t n = grid.size();
  const double dt = grid.step();
  const std::size_t m = epsilons.size();
  std::vector<std::vector<double>> beta(m, std::vector<double>(paths.size()));
  parallel_for(paths.size(), threads, [&](std::size_t p) {
    const auto& x = paths[p].values[0];
    const auto& y = paths[p].values[1];
    std::vector<double> acc(m, 0.0);
    std::vector<double> row(m);
    for (std::size_t i = 1; i < n; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t j = 0; j < i; ++j) {
        const double dx = x[i] - x[j];
        const double dy = y[i] - y[j];
        const double r2 = dx * dx + dy * dy;
        for (std::size_t e = 0; e < m; ++e) row[e] += std::exp(-r2 / (2.0 * epsilons[e]));
      }
      for (std::size_t e = 0; e < m; ++e) acc[e] += row[e];
    }
    for (std::size_t e = 0; e < m; ++e) beta[e][p] = acc[e] * dt * dt / (2.0 * kPi * epsilons[e]);
  });

  std::vector<SiltEstimate> out(m);
  for (std::size_t e = 0; e < m; ++e) {
    const auto s = stats::summarize(beta[e]);
    auto& r = out[e];
    r.epsilon = epsilons[e];
    r.mc_mean = s.mean;
    r.mc_var = s.var;
    r.mc_se = s.se_mean;
    r.mc_var_se = s.se_var;
    r.n_paths = paths.size();
    r.steps = n - 1;
  }
  return out;
}

namespace {

// Inner lag integral int_0^t (eps + sigma^2_{t,t-d})^-1 dd for one outer node, all epsilons.
std::vector<double> mean_beta_pass(std::span<const double> epsilons, const ModelParams& params,
                                   const QuadratureSpec& q, int threads) {
  const int outer_cells = std::max(2, q.cells_per_axis / 6);
  const int inner_cells = std::max(4, q.cells_per_axis / 3);
  const auto rule = quad::gauss_legendre(q.order);
  const auto lag_edges = quad::power_graded_edges(inner_cells, q.grading);
  const std::size_t n_outer = static_cast<std::size_t>(outer_cells) * rule.size();
  const std::size_t m = epsilons.size();
  std::vector<std::vector<double>> partial(n_outer, std::vector<double>(m, 0.0));

  parallel_for(n_outer, threads, [&](std::size_t idx) {
    const std::size_t c = idx / rule.size();
    const std::size_t r = idx % rule.size();
    const double t = params.T * (static_cast<double>(c) + rule.nodes[r]) / outer_cells;
    const double wt = params.T * rule.weights[r] / outer_cells;
    std::vector<double> times{t};
    std::vector<double> wd;
    for (int k = 0; k < inner_cells; ++k) {
      const double lo = lag_edges[static_cast<std::size_t>(k)];
      const double width = lag_edges[static_cast<std::size_t>(k) + 1] - lo;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        times.push_back(t - t * (lo + width * rule.nodes[i]));
        wd.push_back(t * width * rule.weights[i]);
      }
    }
    const CovarianceTable table(times, params, static_cast<int>(times.size()), 4);
    for (std::size_t e = 0; e < m; ++e) {
      double acc = 0.0;
      for (std::size_t i = 1; i < times.size(); ++i) {
        acc += wd[i - 1] / (epsilons[e] + table.increment_variance(0, i));
      }
      partial[idx][e] = wt * acc / (2.0 * kPi);
    }
  });

  std::vector<double> out(m);
  std::vector<double> column(n_outer);
  for (std::size_t e = 0; e < m; ++e) {
    for (std::size_t i = 0; i < n_outer; ++i) column[i] = partial[i][e];
    out[e] = quad::pairwise_sum(column);
  }
  return out;
}

}  // namespace

std::vector<double> analytic_mean_beta(std::span<const double> epsilons, const ModelParams& params,
                                       const QuadratureSpec& quad, int threads) {
  params.validate();
  quad.validate();
  for (double eps : epsilons) require_epsilon(eps, "analytic_mean_beta");
  QuadratureSpec current = quad;
  current.rel_tol = std::max(quad.rel_tol, 1e-6);
  std::vector<double> value = mean_beta_pass(epsilons, params, current, threads);
  for (int r = 0; r < quad.max_refinements; ++r) {
    current = current.refined();
    const auto finer = mean_beta_pass(epsilons, params, current, threads);
    bool ok = true;
    double worst = 0.0;
    std::size_t worst_at = 0;
    for (std::size_t e = 0; e < finer.size(); ++e) {
      const double diff = std::abs(finer[e] - value[e]);
      if (diff > std::max(current.rel_tol * std::abs(finer[e]), current.abs_tol)) ok = false;
      if (diff >= worst) {
        worst = diff;
        worst_at = e;
      }
    }
    value = finer;
    if (ok) return value;
    if (r + 1 == quad.max_refinements) {
      throw NumericError("analytic_mean_beta: refinement budget exhausted before reaching rel_tol",
                         value[worst_at], worst);
    }
  }
  return value;
}

double analytic_mean_beta(double epsilon, const ModelParams& params, const QuadratureSpec& quad) {
  const double eps[1] = {epsilon};
  return analytic_mean_beta(eps, params, quad).front();
}

namespace {

std::vector<double> uniform_times(double T, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(steps);
  return t;
}

}  // namespace

SiltGrid::SiltGrid(const ModelParams& params, std::size_t steps, const QuadratureSpec& quad)
    : params_(params),
      steps_(steps),
      table_(uniform_times(params.T, steps), params,
             std::max(quad.cells_per_axis, 2 * static_cast<int>(steps)), std::clamp(quad.order, 3, 4)) {
  if (steps < 2) throw DomainError("SiltGrid: need at least two steps");
}

double SiltGrid::d_H(std::size_t j, std::size_t k, std::size_t jp, std::size_t kp) const {
  const double m = mu(j, k, jp, kp);
  return sigma2(k, j) * sigma2(kp, jp) - m * m;
}

std::vector<SiltGrid::Moments> SiltGrid::moments(std::span<const double> epsilons, std::size_t stride,
                                                 int threads) const {
  for (double eps : epsilons) require_epsilon(eps, "SiltGrid::moments");
  if (stride == 0 || steps_ % stride != 0) throw DomainError("SiltGrid::moments: stride must divide steps");
  const std::size_t n = steps_ / stride;
  const double h = params_.T / static_cast<double>(n);

  // Lumped weights of the piecewise-linear interpolant on the triangulated
  // triangle {s <= t}: each triangle gives a third of its area to each vertex.
  std::vector<double> lumped((n + 1) * (n + 1), 0.0);
  const double third = h * h / 6.0;
  auto at = [&](std::size_t j, std::size_t k) -> double& { return lumped[j * (n + 1) + k]; };
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      at(j, k + 1) += third;
      at(j + 1, k + 1) += third;
      if (j < k) {
        at(j, k) += 2.0 * third;
        at(j + 1, k) += third;
        at(j + 1, k + 1) += third;
      } else {
        at(j, k) += third;
      }
    }
  }

  struct Node {
    std::size_t j, k;
    double weight;
    double var;
  };
  std::vector<Node> nodes;
  nodes.reserve((n + 1) * (n + 2) / 2);
  for (std::size_t k = 0; k <= n; ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      nodes.push_back({j * stride, k * stride, at(j, k), sigma2(k * stride, j * stride)});
    }
  }

  const std::size_t m = epsilons.size();
  constexpr double norm = 1.0 / (4.0 * kPi * kPi);
  // Per node P: sums over P' >= P, counted twice off the diagonal.
  std::vector<std::vector<double>> second(nodes.size(), std::vector<double>(m));
  std::vector<std::vector<double>> variance(nodes.size(), std::vector<double>(m));
  parallel_for(nodes.size(), threads, [&](std::size_t p) {
    const Node& P = nodes[p];
    std::vector<double> s2(m, 0.0), vv(m, 0.0);
    for (std::size_t q = p; q < nodes.size(); ++q) {
      const Node& Q = nodes[q];
      const double w = (q == p ? 1.0 : 2.0) * Q.weight;
      const double c = mu(P.j, P.k, Q.j, Q.k);
      const double c2 = c * c;
      for (std::size_t e = 0; e < m; ++e) {
        const double ab = (P.var + epsilons[e]) * (Q.var + epsilons[e]);
        const double det = ab - c2;
        s2[e] += w / det;
        vv[e] += w * c2 / (det * ab);
      }
    }
    for (std::size_t e = 0; e < m; ++e) {
      second[p][e] = P.weight * s2[e] * norm;
      variance[p][e] = P.weight * vv[e] * norm;
    }
  });

  std::vector<Moments> out(m);
  std::vector<double> column(nodes.size());
  for (std::size_t e = 0; e < m; ++e) {
    out[e].epsilon = epsilons[e];
    for (std::size_t i = 0; i < nodes.size(); ++i) column[i] = nodes[i].weight / (2.0 * kPi * (nodes[i].var + epsilons[e]));
    out[e].mean = quad::pairwise_sum(column);
    for (std::size_t i = 0; i < nodes.size(); ++i) column[i] = second[i][e];
    out[e].second = quad::pairwise_sum(column);
    for (std::size_t i = 0; i < nodes.size(); ++i) column[i] = variance[i][e];
    out[e].var = quad::pairwise_sum(column);
  }
  return out;
}

std::vector<VarianceEstimate> analytic_var_beta(std::span<const double> epsilons, const SiltGrid& grid,
                                                int threads, double rel_tol) {
  if (grid.steps() % 2 != 0) throw DomainError("analytic_var_beta: grid steps must be even");
  const auto fine = grid.moments(epsilons, 1, threads);
  const auto coarse = grid.moments(epsilons, 2, threads);
  std::vector<VarianceEstimate> out(epsilons.size());
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    out[e] = {epsilons[e], fine[e].var, std::abs(fine[e].var - coarse[e].var)};
    if (out[e].indicator > rel_tol * out[e].value) {
      throw NumericError("analytic_var_beta: grid of " + std::to_string(grid.steps()) +
                             " steps too coarse for epsilon " + format_double(epsilons[e]),
                         out[e].value, out[e].indicator);
    }
  }
  return out;
}

double analytic_var_beta(double epsilon, const ModelParams& params, const QuadratureSpec& quad,
                         std::size_t steps, double rel_tol) {
  const SiltGrid grid(params, steps, quad);
  const double eps[1] = {epsilon};
  return analytic_var_beta(eps, grid, 1, rel_tol).front().value;
}

std::vector<ConvergenceRow> convergence_study(std::span<const double> epsilon_seq, const ModelParams& params,
                                              const QuadratureSpec& quad, std::size_t steps, int threads,
                                              double rel_tol) {
  if (epsilon_seq.empty()) throw DomainError("convergence_study: empty epsilon sequence");
  for (std::size_t i = 1; i < epsilon_seq.size(); ++i) {
    if (!(epsilon_seq[i] < epsilon_seq[i - 1])) throw DomainError("convergence_study: epsilons must decrease");
  }
  const SiltGrid grid(params, steps, quad);
  const auto var = analytic_var_beta(epsilon_seq, grid, threads, rel_tol);
  std::vector<ConvergenceRow> rows(var.size());
  for (std::size_t i = 0; i < var.size(); ++i) {
    rows[i].epsilon = var[i].epsilon;
    rows[i].analytic_var = var[i].value;
    rows[i].delta_prev = i == 0 ? 0.0 : std::abs(var[i].value - var[i - 1].value);
    rows[i].indicator = var[i].indicator;
  }
  return rows;
}

double hstar(double y, double x, double u, double v, const ModelParams& params) {
  params.validate();
  if (!(0.0 <= x && x < y)) throw DomainError("hstar: requires 0 <= x < y");
  auto leg = [&](double r) {
    const double upper = (r > 0.0 && r <= y) ? eval_h_or_unit(y, r, params.a) : 0.0;
    const double lower = (r > 0.0 && r <= x) ? eval_h_or_unit(x, r, params.a) : 0.0;
    return upper - lower;
  };
  return leg(u) * leg(v);
}

std::vector<Tuple> sample_tuples(std::size_t steps, std::size_t count, OrderingCase c, std::uint64_t seed) {
  if (steps < 5) throw DomainError("sample_tuples: need at least five steps for four interior indices");
  std::vector<Tuple> out;
  out.reserve(count);
  const auto stream = static_cast<std::uint32_t>(c);
  for (std::size_t i = 0; i < count; ++i) {
    PathStream rng(seed, i, stream);
    std::array<std::size_t, 4> idx{};
    for (;;) {
      for (auto& v : idx) v = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(steps - 1));
      std::sort(idx.begin(), idx.end());
      if (idx[0] < idx[1] && idx[1] < idx[2] && idx[2] < idx[3] && idx[3] < steps) break;
    }
    switch (c) {
      case OrderingCase::interleaved: out.push_back({idx[0], idx[2], idx[1], idx[3]}); break;
      case OrderingCase::nested: out.push_back({idx[1], idx[2], idx[0], idx[3]}); break;
      case OrderingCase::disjoint: out.push_back({idx[0], idx[1], idx[2], idx[3]}); break;
    }
  }
  return out;
}

KappaReport dh_lower_bound_check(const SiltGrid& grid, std::span<const Tuple> tuples, OrderingCase c) {
  const double two_h = 2.0 * grid.params().H.value();
  KappaReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& tp : tuples) {
    const double s = grid.time(tp.s), t = grid.time(tp.t), sp = grid.time(tp.sp), tt = grid.time(tp.tp);
    const double bracket = c == OrderingCase::interleaved
                               ? pow2h(t - s, two_h) * pow2h(tt - t, two_h) + pow2h(tt - sp, two_h) * pow2h(sp - s, two_h)
                               : pow2h(t - s, two_h) * pow2h(tt - sp, two_h);
    if (!(bracket > 0.0)) throw DomainError("dh_lower_bound_check: tuple not strictly ordered");
    const double ratio = grid.d_H(tp.s, tp.t, tp.sp, tp.tp) / bracket;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.argmin = tp;
    }
    ++rep.n;
  }
  return rep;
}

namespace {

template <class Lhs, class Rhs>
RatioReport ratio_sweep(std::span<const Tuple> tuples, double abs_tol, Lhs&& lhs_of, Rhs&& rhs_of) {
  RatioReport rep;
  rep.max_ratio = 0.0;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& tp : tuples) {
    const double lhs = lhs_of(tp);
    const double rhs = rhs_of(tp);
    ++rep.n;
    if (!(rhs > 0.0)) {
      if (lhs > abs_tol) ++rep.violations;
      continue;
    }
    rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    rep.min_ratio = std::min(rep.min_ratio, lhs / rhs);
  }
  if (rep.n == rep.violations) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace

RatioReport variance_shift_check(const SiltGrid& grid, std::span<const Tuple> tuples, double abs_tol) {
  const double two_h = 2.0 * grid.params().H.value();
  return ratio_sweep(
      tuples, abs_tol,
      [&](const Tuple& x) { return grid.sigma2(x.tp, x.s) - grid.sigma2(x.tp, x.t); },
      [&](const Tuple& x) {
        const double tp = grid.time(x.tp);
        return pow2h(tp - grid.time(x.s), two_h) - pow2h(tp - grid.time(x.t), two_h);
      });
}

RatioReport covariance_shift_check(const SiltGrid& grid, std::span<const Tuple> tuples, double abs_tol) {
  const double two_h = 2.0 * grid.params().H.value();
  return ratio_sweep(
      tuples, abs_tol, [&](const Tuple& x) { return 2.0 * grid.mu(x.s, x.t, x.sp, x.tp); },
      [&](const Tuple& x) {
        const double s = grid.time(x.s), t = grid.time(x.t), sp = grid.time(x.sp), tp = grid.time(x.tp);
        return pow2h(tp - s, two_h) - pow2h(tp - t, two_h) + pow2h(sp - t, two_h) - pow2h(sp - s, two_h);
      });
}

void write_silt_csv(const std::filesystem::path& path, const std::vector<SiltEstimate>& rows) {
  CsvWriter out(path, {"epsilon", "mc_mean", "mc_se", "analytic_mean", "mc_var", "analytic_var", "n_paths", "steps"});
  for (const auto& r : rows) {
    out.row({r.epsilon, r.mc_mean, r.mc_se, r.analytic_mean, r.mc_var, r.analytic_var,
             static_cast<double>(r.n_paths), static_cast<double>(r.steps)});
  }
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceRow>& rows) {
  CsvWriter out(path, {"epsilon", "analytic_var", "delta_prev"});
  for (const auto& r : rows) out.row({r.epsilon, r.analytic_var, r.delta_prev});
}

}  // namespace fsad
