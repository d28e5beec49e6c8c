#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "fsad/error.hpp"
#include "fsad/gausscov.hpp"
#include "oracles.hpp"

using namespace fsad;

namespace {
ModelParams params(double a, double H) {
  ModelParams p;
  p.a = a;
  p.H = HurstIndex(H);
  return p;
}
}  // namespace

TEST_SUITE("gausscov") {
  TEST_CASE("cell moments against high-precision values") {
    const HurstIndex H(0.75);
    CHECK(cell_moment({0, 1}, {2, 3}, H, MomentDegree::k00) == doctest::Approx(oracle::cell00).epsilon(1e-13));
    CHECK(cell_moment({0, 1}, {2, 3}, H, MomentDegree::k11) == doctest::Approx(oracle::cell11).epsilon(1e-13));
    CHECK(cell_moment({0, 1}, {0, 1}, H, MomentDegree::k00) == doctest::Approx(1.0).epsilon(1e-13));
  }

  TEST_CASE("phi is singular on the diagonal") {
    CHECK_THROWS_AS(phi(0.3, 0.3, HurstIndex(0.6)), DomainError);
    CHECK(phi(0.0, 1.0, HurstIndex(0.6)) == doctest::Approx(0.12));
  }

  TEST_CASE("weighted double integral of constants") {
    const HurstIndex H(0.6);
    auto one = [](double) { return 1.0; };
    const double v = weighted_double_integral(one, one, {0, 2}, {0, 2}, H, QuadratureSpec{});
    CHECK(v == doctest::Approx(std::pow(2.0, 1.2)).epsilon(1e-10));
  }

  TEST_CASE("tiny attraction reduces to fBm") {
    auto p = params(1e-12, 0.65);
  p.T = 3.0;
    const QuadratureSpec q;
    for (double t : {0.2, 1.0, 3.0}) CHECK(sigma2(t, p, q) == doctest::Approx(std::pow(t, 1.3)).epsilon(1e-8));
    CHECK(sigma2_increment(1.0, 0.4, p, q) == doctest::Approx(std::pow(0.6, 1.3)).epsilon(1e-8));
  }

  TEST_CASE("attraction shrinks the variance below the fBm value") {
    auto p = params(2.0, 0.7);
  p.T = 1.5;
    const QuadratureSpec q;
    const double v = sigma2(1.5, p, q);
    CHECK(v > 0.0);
    CHECK(v < std::pow(1.5, 1.4));
  }

  TEST_CASE("increment covariance identities") {
    const auto p = params(1.0, 0.6);
    const QuadratureSpec q;
    CHECK(mu_pair(0.2, 0.9, 0.2, 0.9, p, q) == doctest::Approx(sigma2_increment(0.9, 0.2, p, q)).epsilon(1e-10));
    CHECK(mu_pair(0.1, 0.5, 0.3, 0.8, p, q) == doctest::Approx(mu_pair(0.3, 0.8, 0.1, 0.5, p, q)).epsilon(1e-10));
    CHECK(dH(0.1, 0.5, 0.3, 0.8, p, q) > 0.0);
    CHECK(dH(0.2, 0.9, 0.2, 0.9, p, q) == doctest::Approx(0.0).epsilon(1e-8));
  }

  TEST_CASE("convergence bounds hold") {
    const auto p = params(1.0, 0.6);
    const QuadratureSpec q;
    for (double t : {0.5, 2.0}) {
      CHECK(l2_stochastic_bound(t, p, q).holds());
      CHECK(l2_deterministic_bound(t, p, q).holds());
    }
    const auto g1 = l2_gap(1.0, p, q, 1e7), g4 = l2_gap(4.0, p, q, 1e7);
    CHECK(g4.value < g1.value);
    CHECK(make_bound(1.0, 2.0).margin == 1.0);
    CHECK_FALSE(make_bound(3.0, 2.0).holds());
  }

  TEST_CASE("local nondeterminism constant is positive") {
    const auto r = lnd_ratio(TimeGrid::uniform(1.0, 6), params(1.0, 0.7), QuadratureSpec{}, 200, 5);
    CHECK(r.exact > 0.0);
    CHECK(r.random_search >= r.exact - 1e-12);
  }

  TEST_CASE("increment variance ratio stays bounded") {
    const auto r = increment_ratio_range(params(1.0, 0.7), QuadratureSpec{}, 12);
    CHECK(r.min > 0.0);
    CHECK(r.max <= 1.0 + 1e-9);
  }

  TEST_CASE("covariance report csv") {
    const CovarianceReport rep(TimeGrid::uniform(1.0, 4), params(1.0, 0.6), QuadratureSpec{});
    const auto path = std::filesystem::temp_directory_path() / "fsad_cov_test.csv";
    rep.write_csv(path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,s,sigma2_t,sigma2_incr,cross_cov");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 15);
    CHECK(rep.d_H(0, 2, 1, 3) > 0.0);
  }
}
