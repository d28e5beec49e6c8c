#include <doctest.h>

#include <cmath>
#include <vector>

#include "fsad/error.hpp"
#include "fsad/fbm.hpp"
#include "fsad/stats.hpp"

using namespace fsad;

TEST_SUITE("fbm") {
  TEST_CASE("closed-form covariances") {
    const HurstIndex H(0.7);
    CHECK(fbm_covariance(1.0, 1.0, H) == doctest::Approx(1.0));
    CHECK(fbm_covariance(0.5, 2.0, H) ==
          doctest::Approx(0.5 * (std::pow(2.0, 1.4) + std::pow(0.5, 1.4) - std::pow(1.5, 1.4))));
    CHECK(fgn_covariance(0, 0.1, H) == doctest::Approx(std::pow(0.1, 1.4)));
    CHECK_THROWS(fgn_covariance(-3, 0.1, H));
    CHECK(fgn_covariance(3, 0.1, H) > 0.0);
  }

  TEST_CASE("circulant embedding is nonnegative") {
    const FbmGenerator g(TimeGrid::uniform(1.0, 100), HurstIndex(0.9), FbmMethod::circulant);
    for (double e : g.embedding_eigenvalues()) CHECK(e >= 0.0);
  }

  TEST_CASE("paths start at zero and are reproducible") {
    const auto grid = TimeGrid::uniform(1.0, 32);
    const auto a = generate_fbm(grid, HurstIndex(0.6), 9, 8, FbmMethod::circulant, 1);
    const auto b = generate_fbm(grid, HurstIndex(0.6), 9, 8, FbmMethod::circulant, 3);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].values.front() == 0.0);
      CHECK(a[i].values == b[i].values);
    }
    const auto c = generate_fbm(grid, HurstIndex(0.6), 10, 8, FbmMethod::circulant, 1);
    CHECK(a[0].values != c[0].values);
  }

  TEST_CASE("increments sum to values") {
    const FbmGenerator g(TimeGrid::uniform(2.0, 16), HurstIndex(0.75), FbmMethod::cholesky);
    std::vector<double> v(17), d(16);
    g.sample(3, 4, 0, v);
    g.increments(3, 4, 0, d);
    double acc = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      acc += d[k];
      CHECK(v[k + 1] == doctest::Approx(acc).epsilon(1e-12));
    }
  }

  TEST_CASE("both methods reproduce the terminal variance") {
    const HurstIndex H(0.65);
    const auto grid = TimeGrid::uniform(1.0, 20);
    for (auto m : {FbmMethod::circulant, FbmMethod::cholesky}) {
      const auto paths = generate_fbm(grid, H, 42, 4000, m, 2);
      std::vector<double> x;
      for (const auto& p : paths) x.push_back(p.values.back() * p.values.back());
      const auto s = stats::summarize(x);
      CHECK(std::abs(s.mean - 1.0) < 4.0 * s.se_mean);
    }
  }
}
