#include "fsad/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fsad/error.hpp"
#include "fsad/fbm.hpp"
#include "fsad/gram.hpp"
#include "fsad/io.hpp"
#include "fsad/kernel.hpp"
#include "fsad/parallel.hpp"
#include "fsad/rng.hpp"
#include "fsad/stats.hpp"

namespace fsad {

const char* to_string(SimMethod m) noexcept {
  switch (m) {
    case SimMethod::gaussian_exact: return "gaussian_exact";
    case SimMethod::representation: return "representation";
    case SimMethod::euler: return "euler";
  }
  return "unknown";
}

DriftSpec DriftSpec::custom(std::function<double(double)> f, double lipschitz_constant) {
  if (!f) throw DomainError("DriftSpec::custom: empty interaction");
  if (!(lipschitz_constant >= 0.0)) throw DomainError("DriftSpec::custom: Lipschitz constant must be >= 0");
  DriftSpec d;
  d.kind = Kind::custom;
  d.phi = std::move(f);
  d.lipschitz = lipschitz_constant;
  return d;
}

double model_mean(double t, const ModelParams& params) {
  return params.z + params.nu * kernel_mean_integral(t, params.a);
}

namespace {

void check_grid(const ModelParams& params, const TimeGrid& grid) {
  params.validate();
  if (grid.size() < 2) throw DomainError("simulation grid needs at least two points");
  if (grid.back() > params.T * (1.0 + 1e-12)) throw DomainError("simulation grid extends beyond T");
}

std::vector<DiffusionPath> blank_paths(const ModelParams& params, const TimeGrid& grid, std::size_t n_paths,
                                       std::uint64_t seed, SimMethod method) {
  if (n_paths < 1) throw DomainError("n_paths must be >= 1");
  auto shared = std::make_shared<const TimeGrid>(grid);
  std::vector<DiffusionPath> paths(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    DiffusionPath& p = paths[i];
    p.grid = shared;
    p.values.assign(static_cast<std::size_t>(params.d), std::vector<double>(grid.size(), params.z));
    p.params = params;
    p.method = method;
    p.seed = seed;
    p.path_index = i;
  }
  return paths;
}

// Lower factor of a covariance matrix that may be singular up to rounding.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double top = es.eigenvalues().maxCoeff();
  const double low = es.eigenvalues().minCoeff();
  if (low < -1e-10 * top) throw NumericError("path covariance is not positive semidefinite", low, top);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

FbmGenerator driving_noise(const TimeGrid& grid, const HurstIndex& H) {
  if (!grid.is_uniform()) throw UnsupportedError("this simulator requires a uniform grid");
  try {
    return FbmGenerator(grid, H, FbmMethod::circulant);
  } catch (const MethodError&) {
    return FbmGenerator(grid, H, FbmMethod::cholesky);
  }
}

}  // namespace

std::vector<DiffusionPath> simulate_gaussian_exact(const ModelParams& params, const TimeGrid& grid,
                                                   std::size_t n_paths, std::uint64_t seed,
                                                   const QuadratureSpec& quad, int threads) {
  check_grid(params, grid);
  quad.validate();
  const std::size_t n = grid.size() - 1;
  if (n > 2048) throw UnsupportedError("gaussian_exact is limited to 2048 grid points after 0");
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<double> times(grid.points().begin() + 1, grid.points().end());
  Eigen::MatrixXd cov(dim, dim);
  if (params.a == 0.0) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        cov(i, j) = cov(j, i) = fbm_covariance(times[static_cast<std::size_t>(i)],
                                               times[static_cast<std::size_t>(j)], params.H);
      }
    }
  } else {
    const int cells = std::max(quad.cells_per_axis, static_cast<int>(n));
    const int order = std::clamp(2048 / cells, 3, quad.order);
    cov = CovarianceTable(times, params, cells, order).cov();
  }
  const Eigen::MatrixXd factor = covariance_factor(cov);
  Eigen::VectorXd mean(dim);
  for (Eigen::Index i = 0; i < dim; ++i) mean(i) = model_mean(times[static_cast<std::size_t>(i)], params);

  auto paths = blank_paths(params, grid, n_paths, seed, SimMethod::gaussian_exact);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    Eigen::VectorXd z(dim);
    for (int d = 0; d < params.d; ++d) {
      PathStream rng(seed, p, static_cast<std::uint32_t>(d));
      for (Eigen::Index i = 0; i < dim; ++i) z(i) = rng.normal();
      const Eigen::VectorXd x = mean + factor * z;
      std::vector<double>& out = paths[p].values[static_cast<std::size_t>(d)];
      for (Eigen::Index i = 0; i < dim; ++i) out[static_cast<std::size_t>(i) + 1] = x(i);
    }
  });
  return paths;
}

std::vector<DiffusionPath> simulate_representation(const ModelParams& params, const TimeGrid& grid,
                                                   std::size_t n_paths, std::uint64_t seed, int threads) {
  check_grid(params, grid);
  const FbmGenerator noise = driving_noise(grid, params.H);
  const std::size_t n = grid.size() - 1;
  const double dt = grid.step();
  // weight[k][i] = h(t_k, midpoint of step i), i < k.
  std::vector<std::vector<double>> weight(n + 1);
  std::vector<double> drift(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    weight[k].resize(k);
    for (std::size_t i = 0; i < k; ++i) weight[k][i] = eval_h_or_unit(grid[k], (i + 0.5) * dt, params.a);
    drift[k] = params.nu * kernel_mean_integral(grid[k], params.a);
  }
  auto paths = blank_paths(params, grid, n_paths, seed, SimMethod::representation);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    std::vector<double> db(n);
    for (int d = 0; d < params.d; ++d) {
      noise.increments(seed, p, static_cast<std::uint32_t>(d), db);
      std::vector<double>& out = paths[p].values[static_cast<std::size_t>(d)];
      for (std::size_t k = 1; k <= n; ++k) {
        double acc = params.z;
        for (std::size_t i = 0; i < k; ++i) acc += weight[k][i] * db[i];
        out[k] = acc + drift[k];
      }
    }
  });
  return paths;
}

std::vector<DiffusionPath> simulate_euler(const ModelParams& params, const DriftSpec& drift, const TimeGrid& grid,
                                          std::size_t n_paths, std::uint64_t seed, int threads) {
  check_grid(params, grid);
  const FbmGenerator noise = driving_noise(grid, params.H);
  const std::size_t n = grid.size() - 1;
  const double dt = grid.step();
  const double lip = drift.kind == DriftSpec::Kind::linear ? params.a : drift.lipschitz;
  if (dt * lip * params.T > 1.0) {
    throw ResolutionError("Euler step too large for the Lipschitz guard (step * L * T > 1)");
  }
  const bool linear = drift.kind == DriftSpec::Kind::linear;
  auto paths = blank_paths(params, grid, n_paths, seed, SimMethod::euler);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    std::vector<double> db(n);
    for (int d = 0; d < params.d; ++d) {
      noise.increments(seed, p, static_cast<std::uint32_t>(d), db);
      std::vector<double>& x = paths[p].values[static_cast<std::size_t>(d)];
      double running = 0.0;  // sum_{j<k} X_j dt
      for (std::size_t k = 0; k < n; ++k) {
        double interaction;
        if (linear) {
          interaction = -params.a * (static_cast<double>(k) * dt * x[k] - running);
        } else {
          interaction = 0.0;
          for (std::size_t j = 0; j < k; ++j) interaction += drift.phi(x[k] - x[j]) * dt;
        }
        running += x[k] * dt;
        x[k + 1] = x[k] + db[k] + dt * (params.nu + interaction);
      }
    }
  });
  return paths;
}

MomentReport moment_report(const std::vector<DiffusionPath>& paths, int dim) {
  if (paths.empty()) throw DomainError("moment_report: no paths");
  const TimeGrid& grid = *paths.front().grid;
  MomentReport r;
  r.n_paths = paths.size();
  std::vector<double> column(paths.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t p = 0; p < paths.size(); ++p) column[p] = paths[p].values[static_cast<std::size_t>(dim)][k];
    const stats::Summary s = stats::summarize(column);
    r.t.push_back(grid[k]);
    r.mean.push_back(s.mean);
    r.se_mean.push_back(s.se_mean);
    r.var.push_back(s.var);
    r.se_var.push_back(s.se_var);
  }
  return r;
}

void write_moments_csv(const std::filesystem::path& path, const MomentReport& report) {
  io::CsvWriter csv(path, {"t", "mean", "se_mean", "var", "se_var"});
  for (std::size_t k = 0; k < report.t.size(); ++k) {
    csv.row({report.t[k], report.mean[k], report.se_mean[k], report.var[k], report.se_var[k]});
  }
}

void write_paths_csv(const std::filesystem::path& path, const std::vector<DiffusionPath>& paths) {
  io::CsvWriter csv(path, {"path_index", "dim", "t", "value"});
  for (const DiffusionPath& p : paths) {
    for (std::size_t d = 0; d < p.values.size(); ++d) {
      for (std::size_t k = 0; k < p.values[d].size(); ++k) {
        csv.row({static_cast<double>(p.path_index), static_cast<double>(d), (*p.grid)[k], p.values[d][k]});
      }
    }
  }
}

std::vector<SupDecayRow> sup_decay_study(const ModelParams& params, std::size_t n_paths, std::uint64_t seed,
                                         const std::vector<int>& horizons, const std::vector<double>& epsilons,
                                         int steps_per_unit, const QuadratureSpec& quad, int threads) {
  params.validate();
  if (horizons.empty() || epsilons.empty()) throw DomainError("sup_decay_study: empty horizon or epsilon list");
  if (steps_per_unit < 1) throw DomainError("sup_decay_study: steps_per_unit must be >= 1");
  for (int h : horizons) {
    if (h < 0 || h + 1 > params.T) throw DomainError("sup_decay_study: every window [n, n+1] must lie inside [0, T]");
  }
  const auto steps = static_cast<std::size_t>(std::lround(params.T * steps_per_unit));
  const TimeGrid grid = TimeGrid::uniform(params.T, steps);
  const auto paths = simulate_gaussian_exact(params, grid, n_paths, seed, quad, threads);

  // Variance of X_n - X_T from the covariance used to draw the paths.
  std::vector<double> times{params.T};
  for (int h : horizons) times.push_back(static_cast<double>(h));
  const int cells = std::max(quad.cells_per_axis, static_cast<int>(steps));
  const CovarianceTable table(times, params, cells, std::clamp(2048 / cells, 3, quad.order));

  std::vector<SupDecayRow> rows;
  const double n = static_cast<double>(n_paths);
  for (double eps : epsilons) {
    std::vector<std::vector<double>> hits(horizons.size(), std::vector<double>(n_paths));
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      const int h = horizons[hi];
      const auto k0 = static_cast<std::size_t>(h) * static_cast<std::size_t>(steps_per_unit);
      const auto k1 = k0 + static_cast<std::size_t>(steps_per_unit);
      std::vector<double> point(n_paths);
      for (std::size_t p = 0; p < n_paths; ++p) {
        const std::vector<double>& x = paths[p].values[0];
        const double end = x.back();
        double sup = 0.0;
        for (std::size_t k = k0; k <= k1; ++k) sup = std::max(sup, std::abs(x[k] - end));
        hits[hi][p] = sup > eps ? 1.0 : 0.0;
        point[p] = std::abs(x[k0] - end) > eps ? 1.0 : 0.0;
      }
      SupDecayRow row;
      row.horizon = h;
      row.epsilon = eps;
      const stats::Summary s = stats::summarize(hits[hi]);
      const stats::Summary q = stats::summarize(point);
      row.sup_freq = s.mean;
      row.sup_se = std::sqrt(s.mean * (1.0 - s.mean) / n);
      row.point_freq = q.mean;
      row.point_se = std::sqrt(q.mean * (1.0 - q.mean) / n);
      row.gap_var = table.increment_variance(0, hi + 1);
      row.tail_bound = row.gap_var > 0.0 ? 2.0 * std::exp(-eps * eps / (2.0 * row.gap_var)) : 0.0;
      rows.push_back(row);
    }
    const std::size_t base = rows.size() - horizons.size();
    for (std::size_t hi = 0; hi + 1 < horizons.size(); ++hi) {
      std::vector<double> diff(n_paths);
      for (std::size_t p = 0; p < n_paths; ++p) diff[p] = hits[hi][p] - hits[hi + 1][p];
      rows[base + hi].drop_se = stats::summarize(diff).se_mean;
    }
  }
  return rows;
}

}  // namespace fsad
