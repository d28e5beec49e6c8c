#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsad/error.hpp"
#include "fsad/gausscov.hpp"
#include "fsad/gram.hpp"
#include "fsad/kernel.hpp"
#include "fsad/localtime.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/simulate.hpp"
#include "fsad/stats.hpp"
#include "oracles.hpp"

using namespace fsad;

namespace {
ModelParams params(double a) {
  ModelParams p;
  p.a = a;
  p.H = HurstIndex(0.6);
  return p;
}
}  // namespace

TEST_SUITE("localtime") {
  TEST_CASE("occupation of a straight line") {
    const auto grid = TimeGrid::uniform(1.0, 10);
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = grid[k];
    CHECK(occupation(grid, v, 0.5, 1.0, 0.1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(occupation(grid, v, 0.53, 1.0, 0.05) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(occupation(grid, v, 0.5, 0.5, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(occupation(grid, v, 3.0, 1.0, 0.1) == 0.0);
    std::vector<double> w(grid.size(), 2.0);
    CHECK(occupation(grid, v, 0.5, 1.0, 0.1, w) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("fBm reduction of the mean local time") {
    CHECK(analytic_mean_local_time(1.0, 0.0, params(0.0), QuadratureSpec{}) ==
          doctest::Approx(oracle::local_time_fbm).epsilon(1e-8));
  }

  TEST_CASE("drift covariance by two routes") {
    const auto p = params(1.0);
    const double s = 0.8;
    const auto rule = quad::gauss_legendre(12);
    std::vector<double> times{0.0};
    for (std::size_t i = 0; i < rule.size(); ++i) times.push_back(s * rule.nodes[i]);
    times.push_back(s);
    const CovarianceTable table(times, p, 64, 6);
    const std::size_t last = times.size() - 1;
    double route = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) route += s * rule.weights[i] * (table.cov()(last, last) - table.cov()(last, i + 1));
    CHECK(drift_covariance(s, p, QuadratureSpec{}) == doctest::Approx(route).epsilon(1e-7));
  }

  TEST_CASE("Tanaka identity closes in expectation") {
    const auto p = params(1.0);
    for (double x : {0.0, 0.5}) {
      const auto t = tanaka_terms(1.0, x, p, QuadratureSpec{});
      CHECK(std::abs(t.residual) < 1e-6 * t.e_abs);
    }
    CHECK(std::abs(tanaka_expectation_residual(1.0, 0.2, params(0.0), QuadratureSpec{})) < 1e-8);
  }

  TEST_CASE("estimator rejects bandwidths below the guard") {
    const auto paths = simulate_gaussian_exact(params(1.0), TimeGrid::uniform(1.0, 64), 50, 2, QuadratureSpec{});
    const double guard = bandwidth_guard(paths, 1.0);
    CHECK(guard > 0.0);
    CHECK_THROWS_AS(estimate_local_time(paths, 0.0, 1.0, 0.5 * guard), ResolutionError);
    const auto e = estimate_local_time(paths, 0.0, 1.0, 2.0 * guard);
    CHECK(e.value > 0.0);
    CHECK(e.n_paths == 50);
    const auto w = WeightTable::build(*paths.front().grid, params(1.0), QuadratureSpec{});
    CHECK(estimate_weighted_local_time(paths, 0.0, 1.0, 2.0 * guard, w).value > 0.0);
  }

  TEST_CASE("local time needs a centred model") {
    auto p = params(1.0);
    p.nu = 0.3;
    CHECK_THROWS_AS(analytic_mean_local_time(1.0, 0.0, p, QuadratureSpec{}), DomainError);
  }
  TEST_CASE("occupation density integrates to elapsed time and grows with t") {
    const auto paths = simulate_gaussian_exact(params(1.0), TimeGrid::uniform(1.0, 512), 4, 6, QuadratureSpec{});
    for (const auto& path : paths) {
      const auto& grid = *path.grid;
      const auto& v = path.values[0];
      const double dx = 0.01;
      double total = 0.0;
      for (double x = -6.0; x <= 6.0; x += dx) total += occupation(grid, v, x, 1.0, 0.05) * dx;
      CHECK(total == doctest::Approx(1.0).epsilon(2e-2));
      double prev = 0.0;
      for (double t : {0.25, 0.5, 0.75, 1.0}) {
        const double o = occupation(grid, v, 0.0, t, 0.05);
        CHECK(o >= prev);
        prev = o;
      }
    }
  }
  TEST_CASE("second moments scale no faster than the bound allows") {
    auto p = params(1.0);
    p.T = 2.0;
    const auto paths = simulate_gaussian_exact(p, TimeGrid::uniform(2.0, 512), 1000, 21, QuadratureSpec{}, 2);
    const auto w = WeightTable::build(*paths.front().grid, p, QuadratureSpec{});
    std::vector<double> logt, plain, weighted;
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
      const double bw = std::max(0.05 * std::sqrt(sigma2(t, p, QuadratureSpec{})), bandwidth_guard(paths, t));
      auto second = [](const std::vector<double>& x) {
        double m = 0.0;
        for (double v : x) m += v * v;
        return m / static_cast<double>(x.size());
      };
      const double m2 = second(local_time_samples(paths, 0.0, t, bw));
      const double w2 = second(local_time_samples(paths, 0.0, t, bw, w.weights()));
      CHECK(std::isfinite(m2));
      CHECK(std::isfinite(w2));
      logt.push_back(std::log(t));
      plain.push_back(std::log(m2));
      weighted.push_back(std::log(w2));
    }
    CHECK(stats::fit_slope(logt, plain) <= 2.0 - 2.0 * 0.6 + 0.3);
    CHECK(stats::fit_slope(logt, weighted) <= 2.0 * 0.6 + 0.3);
  }
}
