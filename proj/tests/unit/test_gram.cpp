#include <doctest.h>

#include <cmath>

#include "fsad/gausscov.hpp"
#include "fsad/gram.hpp"

using namespace fsad;

TEST_SUITE("gram") {
  TEST_CASE("mesh places order nodes in every cell") {
    const auto mesh = Mesh::from_edges({0.0, 0.5, 2.0}, 4);
    CHECK(mesh.cells() == 2);
    CHECK(mesh.size() == 8);
    const auto v = mesh.sample([](double x) { return x * x * x; });
    CHECK(mesh.integrate(v) == doctest::Approx(4.0).epsilon(1e-14));
  }

  TEST_CASE("breakpoints become cell edges") {
    const double bp[] = {0.0, 0.3, 1.0};
    const auto mesh = Mesh::from_breakpoints(bp, 10, 3);
    bool has = false;
    for (double e : mesh.edges()) has = has || e == 0.3;
    CHECK(has);
    CHECK(mesh.cells() >= 2);
  }

  TEST_CASE("constant function recovers the fBm variance") {
    const HurstIndex H(0.7);
    const UnitGram g(H, 8, 6);
    auto one = [](double) { return 1.0; };
    CHECK(g.bilinear(1.0, one, one) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.bilinear(2.5, one, one) == doctest::Approx(std::pow(2.5, 1.4)).epsilon(1e-12));
  }

  TEST_CASE("gram matrix is symmetric") {
    const auto mesh = Mesh::from_edges({0.0, 0.25, 0.5, 1.0}, 3);
    const PhiGram g(mesh, HurstIndex(0.6));
    const auto& w = g.matrix();
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() < 1e-14 * w.cwiseAbs().maxCoeff());
  }

  TEST_CASE("bilinear form of indicator products matches fBm covariance") {
    const HurstIndex H(0.65);
    const auto mesh = Mesh::from_edges({0.0, 0.4, 1.0}, 6);
    const PhiGram g(mesh, H);
    const auto f = mesh.sample([](double u) { return u < 0.4 ? 1.0 : 0.0; });
    const auto one = mesh.sample([](double) { return 1.0; });
    const double expected = 0.5 * (1.0 + std::pow(0.4, 1.3) - std::pow(0.6, 1.3));
    CHECK(g.bilinear(f, one) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("covariance table agrees with direct quadrature") {
    ModelParams p;
    p.a = 1.5;
    p.H = HurstIndex(0.7);
    p.T = 2.0;
    const CovarianceTable table({0.0, 0.5, 1.2, 2.0}, p, 32, 6);
    const QuadratureSpec q;
    CHECK(table.cov()(1, 1) == doctest::Approx(sigma2(0.5, p, q)).epsilon(1e-8));
    CHECK(table.cov()(3, 2) == doctest::Approx(cross_cov(2.0, 1.2, p, q)).epsilon(1e-8));
    CHECK(table.increment_variance(3, 1) == doctest::Approx(sigma2_increment(2.0, 0.5, p, q)).epsilon(1e-8));
    CHECK(table.increment_cov(2, 1, 3, 2) == doctest::Approx(mu_pair(0.5, 1.2, 1.2, 2.0, p, q)).epsilon(1e-8));
    CHECK(table.cov()(0, 0) == 0.0);
  }
}
