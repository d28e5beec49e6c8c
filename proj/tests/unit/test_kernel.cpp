#include <doctest.h>

#include <cmath>

#include "fsad/error.hpp"
#include "fsad/kernel.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/special.hpp"
#include "oracles.hpp"

using namespace fsad;

TEST_SUITE("kernel") {
  TEST_CASE("kernel against high-precision values") {
    CHECK(eval_h(2.0, 1.0, 1.0) == doctest::Approx(oracle::h_2_1).epsilon(1e-14));
    CHECK(eval_h_limit(1.0, 1.0) == doctest::Approx(oracle::h_limit_1).epsilon(1e-14));
    CHECK(eval_h_limit(100.0, 1.0) == doctest::Approx(oracle::h_limit_100).epsilon(1e-12));
    CHECK(eval_h(2.0, 0.5, 1.0) - eval_h(1.0, 0.5, 1.0) == doctest::Approx(oracle::h_diff_2_1_half).epsilon(1e-13));
  }

  TEST_CASE("boundary values") {
    CHECK(eval_h(1.0, 1.0, 3.0) == 1.0);
    CHECK(eval_h(5.0, 0.0, 3.0) == 1.0);
    CHECK(eval_h(1.0, 2.0, 3.0) == 0.0);
    CHECK(eval_h_or_unit(1.0, 0.5, 0.0) == 1.0);
    CHECK_THROWS_AS(eval_h(1.0, 0.5, 0.0), DomainError);
  }

  TEST_CASE("no overflow for large a t^2") {
    const double v = eval_h(60.0, 30.0, 5.0);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v < 1e-3);
    CHECK(eval_h(1e3, 1e3 - 1e-9, 10.0) == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("time derivative matches a finite difference") {
    const double t = 1.3, s = 0.7, a = 2.0, d = 1e-6;
    const double fd = (eval_h(t + d, s, a) - eval_h(t - d, s, a)) / (2.0 * d);
    CHECK(eval_h_dt(t, s, a) == doctest::Approx(fd).epsilon(1e-7));
  }

  TEST_CASE("mean integral by two routes") {
    const double t = 1.7, a = 0.8;
    const double direct = quad::integrate([&](double s) { return eval_h(t, s, a); }, 0.0, t, 16, 12);
    CHECK(kernel_mean_integral(t, a) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(kernel_mean_integral(50.0, a) == doctest::Approx(std::sqrt(special::kPi / (2.0 * a))).epsilon(1e-14));
    CHECK(kernel_mean_integral(2.0, 0.0) == 2.0);
  }

  TEST_CASE("weight against high-precision values") {
    ModelParams p;
    p.a = 1.0;
    p.H = HurstIndex(0.6);
    CHECK(eval_weight(1.0, p, QuadratureSpec{}) == doctest::Approx(oracle::weight_1).epsilon(1e-10));
    p.a = 2.0;
    p.H = HurstIndex(0.75);
    CHECK(eval_weight(0.5, p, QuadratureSpec{}) == doctest::Approx(oracle::weight_half).epsilon(1e-10));
  }

  TEST_CASE("weight tends to the fBm closed form as a -> 0") {
    ModelParams p;
    p.a = 1e-10;
    p.H = HurstIndex(0.7);
    CHECK(eval_weight(0.8, p, QuadratureSpec{}) == doctest::Approx(1.4 * std::pow(0.8, 0.4)).epsilon(1e-8));
  }

  TEST_CASE("kernel difference support") {
    ModelParams p;
    const KernelDifference g(1.0, 0.4, p);
    CHECK(g(1.5) == 0.0);
    CHECK(g(0.7) == doctest::Approx(eval_h(1.0, 0.7, p.a)));
    CHECK(g(0.2) == doctest::Approx(eval_h(1.0, 0.2, p.a) - eval_h(0.4, 0.2, p.a)));
  }

  TEST_CASE("weight table rows follow the grid") {
    ModelParams p;
    const auto w = WeightTable::build(TimeGrid::uniform(1.0, 4), p, QuadratureSpec{});
    REQUIRE(w.weights().size() == 5);
    CHECK(w.weights()[0] == 0.0);
    CHECK(w.weights()[4] == doctest::Approx(oracle::weight_1).epsilon(1e-10));
  }
}
