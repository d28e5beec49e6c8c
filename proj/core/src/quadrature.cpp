#include "fsad/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fsad/error.hpp"

namespace fsad::quad {

namespace {
// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}
}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = 0.5 * (1.0 - x);
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

Rule gauss_jacobi_left(int n, double gamma) {
  if (n < 1) throw DomainError("gauss_jacobi_left: n must be >= 1");
  if (!(gamma > -1.0)) throw DomainError("gauss_jacobi_left: gamma must exceed -1");
  // Jacobi weight (1-t)^alpha (1+t)^beta on [-1,1] with alpha = 0, beta = gamma.
  const double alpha = 0.0;
  const double beta = gamma;
  const double ab = alpha + beta;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      J(0, 0) = (beta - alpha) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      J(k, k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
      const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
      const double den = s * s * (s + 1.0) * (s - 1.0);
      const double b = std::sqrt(num / den);
      J(k, k - 1) = b;
      J(k - 1, k) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                     std::tgamma(ab + 2.0);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double scale = std::pow(2.0, gamma + 1.0);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    r.nodes[i] = 0.5 * (1.0 + es.eigenvalues()(i));
    r.weights[i] = mu0 * v0 * v0 / scale;
  }
  return r;
}

std::vector<double> power_graded_edges(int cells, double grading) {
  if (cells < 1) throw DomainError("power_graded_edges: cells must be >= 1");
  std::vector<double> e(cells + 1);
  for (int k = 0; k <= cells; ++k) e[k] = std::pow(static_cast<double>(k) / cells, grading);
  e[cells] = 1.0;
  return e;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, int cells, int order) {
  const Rule gl = gauss_legendre(order);
  const double h = (hi - lo) / cells;
  std::vector<double> parts(cells);
  for (int c = 0; c < cells; ++c) {
    const double a = lo + c * h;
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) acc += gl.weights[q] * f(a + h * gl.nodes[q]);
    parts[c] = acc * h;
  }
  return pairwise_sum(parts);
}

Rule power_map_rule(double L, double kappa, int cells, int order, double grading) {
  if (!(L >= 0.0) || !(kappa > 0.0)) throw DomainError("power_map_rule: need L >= 0, kappa > 0");
  const Rule gl = gauss_legendre(order);
  const std::vector<double> edges = power_graded_edges(cells, grading);
  Rule r;
  r.nodes.reserve(static_cast<std::size_t>(cells) * order);
  r.weights.reserve(static_cast<std::size_t>(cells) * order);
  const double p = 1.0 / kappa;
  for (int c = 0; c < cells; ++c) {
    const double a = edges[c];
    const double h = edges[c + 1] - edges[c];
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double xi = a + h * gl.nodes[q];
      r.nodes.push_back(L * std::pow(xi, p));
      r.weights.push_back(gl.weights[q] * h * L * p * std::pow(xi, p - 1.0));
    }
  }
  return r;
}

double integrate_power_map(const std::function<double(double)>& f, double L, double kappa, int cells,
                           int order, double grading) {
  if (L == 0.0) return 0.0;
  const Rule r = power_map_rule(L, kappa, cells, order, grading);
  std::vector<double> terms(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) terms[i] = r.weights[i] * f(r.nodes[i]);
  return pairwise_sum(terms);
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  std::vector<double> w(nodes.size(), 1.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
    }
  }
  return w;
}

void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out) {
  const std::size_t n = nodes.size();
  double ell = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = x - nodes[k];
    if (d == 0.0) {
      for (std::size_t j = 0; j < n; ++j) out[j] = (j == k) ? 1.0 : 0.0;
      return;
    }
    ell *= d;
  }
  for (std::size_t j = 0; j < n; ++j) out[j] = ell * bary[j] / (x - nodes[j]);
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

}  // namespace fsad::quad
