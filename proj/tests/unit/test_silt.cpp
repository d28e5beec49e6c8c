#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fsad/error.hpp"
#include "fsad/kernel.hpp"
#include "fsad/silt.hpp"
#include "fsad/simulate.hpp"
#include "fsad/special.hpp"
#include "oracles.hpp"

using namespace fsad;

namespace {
ModelParams planar(double a) {
  ModelParams p;
  p.a = a;
  p.H = HurstIndex(0.6);
  p.d = 2;
  return p;
}
}  // namespace

TEST_SUITE("silt") {
  TEST_CASE("heat kernel") {
    CHECK(heat_kernel({0.0, 0.0}, 0.5) == doctest::Approx(1.0 / special::kPi));
    double mass = 0.0;
    const double h = 0.02;
    for (double x = -3.0; x < 3.0; x += h)
      for (double y = -3.0; y < 3.0; y += h) mass += heat_kernel({x + h / 2, y + h / 2}, 0.2) * h * h;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
    for (double eps : {0.1, 0.5, 2.0})
      for (auto x : {std::array<double, 2>{0.0, 0.0}, {0.3, -0.2}, {1.0, 0.5}})
        CHECK(std::abs(heat_kernel_fourier(x, eps) - heat_kernel(x, eps)) < 1e-8);
  }

  TEST_CASE("fBm reduction of the mean") {
    const double eps[] = {0.5, 0.2, 0.1};
    const auto m = analytic_mean_beta(eps, planar(0.0), QuadratureSpec{});
    CHECK(m[0] == doctest::Approx(oracle::mean_beta_fbm_05).epsilon(1e-6));
    CHECK(m[1] == doctest::Approx(oracle::mean_beta_fbm_02).epsilon(1e-6));
    CHECK(m[2] == doctest::Approx(oracle::mean_beta_fbm_01).epsilon(1e-6));
  }

  TEST_CASE("vector and scalar means agree and increase as eps falls") {
    const auto p = planar(1.0);
    const double eps[] = {0.5, 0.1};
    const auto m = analytic_mean_beta(eps, p, QuadratureSpec{}, 2);
    CHECK(m[0] == doctest::Approx(analytic_mean_beta(0.5, p, QuadratureSpec{})).epsilon(1e-12));
    CHECK(m[1] > m[0]);
  }

  TEST_CASE("grid moments") {
    const SiltGrid grid(planar(1.0), 32, QuadratureSpec{});
    const double eps[] = {0.4, 0.1};
    const auto mom = grid.moments(eps);
    const auto mean = analytic_mean_beta(eps, planar(1.0), QuadratureSpec{});
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(mom[i].var > 0.0);
      CHECK(mom[i].second - mom[i].mean * mom[i].mean == doctest::Approx(mom[i].var).epsilon(1e-6));
      CHECK(mom[i].mean == doctest::Approx(mean[i]).epsilon(2e-2));
    }
    CHECK(grid.mu(1, 5, 1, 5) == doctest::Approx(grid.sigma2(5, 1)).epsilon(1e-12));
    CHECK(grid.d_H(1, 5, 3, 9) > 0.0);
  }

  TEST_CASE("variance indicator is enforced") {
    const SiltGrid grid(planar(1.0), 16, QuadratureSpec{});
    const double eps[] = {0.01};
    CHECK_THROWS_AS(analytic_var_beta(eps, grid, 1, 1e-4), NumericError);
  }

  TEST_CASE("convergence study rows") {
    const double eps[] = {0.4, 0.2};
    const auto rows = convergence_study(eps, planar(1.0), QuadratureSpec{}, 32);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].delta_prev == 0.0);
    CHECK(rows[1].delta_prev == doctest::Approx(std::abs(rows[1].analytic_var - rows[0].analytic_var)));
  }

  TEST_CASE("Monte Carlo estimator") {
    const auto paths = simulate_gaussian_exact(planar(1.0), TimeGrid::uniform(1.0, 64), 200, 8, QuadratureSpec{});
    const double eps[] = {0.5};
    const auto mc = estimate_beta_mc(paths, eps, 2);
    REQUIRE(mc.size() == 1);
    CHECK(mc[0].mc_mean > 0.0);
    CHECK(mc[0].mc_var >= 0.0);
    CHECK(mc[0].n_paths == 200);
    CHECK(mc[0].steps == 64);
    const double tiny[] = {1e-6};
    CHECK_THROWS_AS(estimate_beta_mc(paths, tiny), ResolutionError);
  }

  TEST_CASE("hstar is a product of kernel differences") {
    const auto p = planar(1.0);
    const double g = eval_h(1.0, 0.3, 1.0) - eval_h(0.5, 0.3, 1.0);
    CHECK(hstar(1.0, 0.5, 0.3, 0.3, p) == doctest::Approx(g * g));
    CHECK(hstar(1.0, 0.5, 0.3, 0.7, p) == doctest::Approx(g * eval_h(1.0, 0.7, 1.0)));
  }

  TEST_CASE("tuple sampling respects the ordering") {
    for (auto c : {OrderingCase::interleaved, OrderingCase::nested, OrderingCase::disjoint}) {
      for (const auto& t : sample_tuples(20, 50, c, 3)) {
        switch (c) {
          case OrderingCase::interleaved: CHECK((t.s < t.sp && t.sp < t.t && t.t < t.tp)); break;
          case OrderingCase::nested: CHECK((t.sp < t.s && t.s < t.t && t.t < t.tp)); break;
          case OrderingCase::disjoint: CHECK((t.s < t.t && t.t < t.sp && t.sp < t.tp)); break;
        }
        CHECK(t.s >= 1);
        CHECK(t.tp <= 19);
      }
    }
  }

  TEST_CASE("increment covariance checks") {
    const SiltGrid grid(planar(1.0), 32, QuadratureSpec{});
    const auto tuples = sample_tuples(32, 200, OrderingCase::interleaved, 4);
    const auto k = dh_lower_bound_check(grid, tuples, OrderingCase::interleaved);
    CHECK(k.min_ratio > 0.0);
    CHECK(k.n == 200);
    const auto r = variance_shift_check(grid, tuples);
    CHECK(r.violations == 0);
    CHECK(r.max_ratio < 1e3);
    const auto d = covariance_shift_check(grid, sample_tuples(32, 200, OrderingCase::disjoint, 5));
    CHECK(d.violations == 0);
  }
}
