#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsad/error.hpp"
#include "fsad/gausscov.hpp"
#include "fsad/kernel.hpp"
#include "fsad/simulate.hpp"

using namespace fsad;

namespace {
ModelParams params(double a, double nu, double z) {
  ModelParams p;
  p.a = a;
  p.nu = nu;
  p.z = z;
  p.H = HurstIndex(0.6);
  return p;
}
}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("model mean") {
    const auto p = params(1.0, 0.5, 0.3);
    CHECK(model_mean(0.0, p) == 0.3);
    CHECK(model_mean(2.0, p) == doctest::Approx(0.3 + 0.5 * kernel_mean_integral(2.0, 1.0)));
    CHECK(model_mean(2.0, params(0.0, 0.5, 0.3)) == doctest::Approx(1.3));
  }

  TEST_CASE("paths start at z in every dimension") {
    auto p = params(1.0, 0.0, -0.4);
    p.d = 2;
    const auto grid = TimeGrid::uniform(1.0, 16);
    for (const auto& path : simulate_gaussian_exact(p, grid, 4, 1, QuadratureSpec{})) {
      REQUIRE(path.values.size() == 2);
      CHECK(path.values[0][0] == -0.4);
      CHECK(path.values[1][0] == -0.4);
    }
  }

  TEST_CASE("without attraction euler and the representation coincide") {
    const auto p = params(0.0, 0.5, 0.3);
    const auto grid = TimeGrid::uniform(1.0, 32);
    const auto e = simulate_euler(p, DriftSpec::linear(), grid, 5, 17);
    const auto r = simulate_representation(p, grid, 5, 17);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(e[i].values[0][k] == doctest::Approx(r[i].values[0][k]).epsilon(1e-12));
  }

  TEST_CASE("thread count does not change the paths") {
    const auto p = params(1.0, 0.2, 0.0);
    const auto grid = TimeGrid::uniform(1.0, 24);
    const auto a = simulate_gaussian_exact(p, grid, 12, 5, QuadratureSpec{}, 1);
    const auto b = simulate_gaussian_exact(p, grid, 12, 5, QuadratureSpec{}, 4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].values == b[i].values);
  }

  TEST_CASE("exact simulation matches mean and variance") {
    const auto p = params(1.0, 0.5, 0.3);
    const auto grid = TimeGrid::uniform(1.0, 32);
    const auto rep = moment_report(simulate_gaussian_exact(p, grid, 4000, 11, QuadratureSpec{}, 2));
    const double v = sigma2(1.0, p, QuadratureSpec{});
    CHECK(std::abs(rep.mean.back() - model_mean(1.0, p)) < 4.0 * rep.se_mean.back());
    CHECK(std::abs(rep.var.back() - v) < 4.0 * rep.se_var.back());
  }

  TEST_CASE("the three methods agree in distribution") {
    const auto p = params(1.0, 0.0, 0.0);
    const auto grid = TimeGrid::uniform(1.0, 128);
    const double v = sigma2(1.0, p, QuadratureSpec{});
    for (auto paths : {simulate_representation(p, grid, 3000, 3), simulate_euler(p, DriftSpec::linear(), grid, 3000, 3)}) {
      const auto rep = moment_report(paths);
      CHECK(std::abs(rep.var.back() - v) < 4.0 * rep.se_var.back() + 0.01 * v);
    }
  }

  TEST_CASE("custom drift needs a Lipschitz constant") {
    CHECK_THROWS(DriftSpec::custom([](double x) { return -x; }, -1.0));
  }
}
