#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "fsad/error.hpp"
#include "fsad/io.hpp"
#include "fsad/params.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/rng.hpp"
#include "fsad/special.hpp"
#include "fsad/stats.hpp"

using namespace fsad;

TEST_SUITE("quadrature") {
  TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    const auto r = quad::gauss_legendre(6);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 11);
    CHECK(s == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  }

  TEST_CASE("Gauss-Jacobi absorbs the power weight") {
    const double gamma = -0.8;
    const auto r = quad::gauss_jacobi_left(5, gamma);
    for (int p : {0, 3, 9}) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      CHECK(s == doctest::Approx(1.0 / (p + gamma + 1.0)).epsilon(1e-13));
    }
  }

  TEST_CASE("power map handles an integrable endpoint singularity") {
    const double kappa = 0.4;
    const double v = quad::integrate_power_map([&](double s) { return std::pow(s, kappa - 1.0); }, 2.0, kappa, 4, 8, 2.0);
    CHECK(v == doctest::Approx(std::pow(2.0, kappa) / kappa).epsilon(1e-12));
  }

  TEST_CASE("pairwise sum is order-fixed and accurate") {
    std::vector<double> x(100000, 0.1);
    CHECK(quad::pairwise_sum(x) == doctest::Approx(10000.0).epsilon(1e-14));
  }

  TEST_CASE("Lagrange basis is a partition of unity") {
    const auto r = quad::gauss_legendre(7);
    const auto bary = quad::barycentric_weights(r.nodes);
    std::vector<double> l(r.size());
    quad::lagrange_basis(r.nodes, bary, 0.3721, l);
    CHECK(std::accumulate(l.begin(), l.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("quadrature settings validation") {
    QuadratureSpec q;
    q.order = 0;
    CHECK_THROWS_AS(q.validate(), DomainError);
    CHECK(QuadratureSpec{}.refined().cells_per_axis == 48);
  }
}

TEST_SUITE("special") {
  TEST_CASE("Mills ratio is continuous across the continued-fraction switch") {
    const double below = special::mills_ratio(8.0 - 1e-9);
    const double above = special::mills_ratio(8.0 + 1e-9);
    CHECK(below == doctest::Approx(above).epsilon(1e-8));
    CHECK(special::mills_ratio(0.0) == doctest::Approx(std::sqrt(special::kPi / 2.0)));
  }

  TEST_CASE("one minus x Mills ratio matches its asymptotic 1/x^2 tail") {
    const double x = 1e4;
    CHECK(special::one_minus_x_mills(x) == doctest::Approx(1.0 / (x * x)).epsilon(1e-6));
  }

  TEST_CASE("folded normal mean") {
    CHECK(special::folded_normal_mean(0.0, 0.0, 1.0) == doctest::Approx(std::sqrt(2.0 / special::kPi)));
    CHECK(special::folded_normal_mean(-50.0, 0.0, 1.0) == doctest::Approx(50.0));
  }
}

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known-answer vector") {
    // Random123 reference: counter = key = 0.
    const auto out = PathStream::philox({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }

  TEST_CASE("streams are reproducible and distinct") {
    PathStream a(1, 2, 0), b(1, 2, 0), c(1, 3, 0), d(1, 2, 1);
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(x != d.normal());
  }

  TEST_CASE("normals have unit variance") {
    PathStream s(9, 0);
    std::vector<double> x(200000);
    s.fill_normal(x);
    const auto sum = stats::summarize(x);
    CHECK(std::abs(sum.mean) < 4.0 * sum.se_mean);
    CHECK(std::abs(sum.var - 1.0) < 4.0 * sum.se_var);
  }
}

TEST_SUITE("stats") {
  TEST_CASE("summary of a small sample") {
    const std::vector<double> x{1, 2, 3, 4};
    const auto s = stats::summarize(x);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.var == doctest::Approx(5.0 / 3.0));
  }

  TEST_CASE("KS statistics and critical values") {
    CHECK(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}) == doctest::Approx(0.0));
    CHECK(stats::ks_two_sample({1, 2, 3}, {4, 5, 6}) == doctest::Approx(1.0));
    CHECK(stats::ks_critical_one_sample(100) == doctest::Approx(0.1628));
  }

  TEST_CASE("least-squares slope") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    CHECK(stats::fit_slope(x, y) == doctest::Approx(2.0));
  }
}

TEST_SUITE("io") {
  TEST_CASE("doubles round-trip through text") {
    const double v = 0.1 + 0.2;
    CHECK(std::stod(io::format_double(v)) == v);
  }

  TEST_CASE("FNV-1a reference values") {
    const std::string empty;
    CHECK(io::fnv1a64(std::span<const char>(empty.data(), 0)) == 0xcbf29ce484222325ULL);
    const std::string a = "a";
    CHECK(io::fnv1a64(std::span<const char>(a.data(), a.size())) == 0xaf63dc4c8601ec8cULL);
  }

  TEST_CASE("CSV writer rejects ragged rows") {
    const auto path = std::filesystem::temp_directory_path() / "fsad_io_test.csv";
    {
      io::CsvWriter w(path, {"x", "y"});
      w.row({1.0, 2.0});
      CHECK_THROWS_AS(w.row({1.0}), Error);
    }
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,y");
    std::filesystem::remove(path);
  }
}
