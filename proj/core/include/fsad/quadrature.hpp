#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fsad::quad {

/// Nodes and weights on [0, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Legendre rule with n nodes on [0, 1].
Rule gauss_legendre(int n);

/// Gauss-Jacobi rule on [0, 1] for the weight x^gamma (gamma > -1):
/// sum w_i f(x_i) = int_0^1 x^gamma f(x) dx exactly for polynomials of degree < 2n.
Rule gauss_jacobi_left(int n, double gamma);

/// Edges 0 = x_0 < ... < x_n = 1 with x_k = (k/n)^grading.
std::vector<double> power_graded_edges(int cells, double grading);

/// Composite Gauss-Legendre on [lo, hi] with uniform cells.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 int cells, int order);

/// int_0^L f(s) ds for integrands behaving like s^(kappa - 1) near 0.
/// Uses s = L xi^(1/kappa) and a power-graded Gauss-Legendre mesh in xi.
double integrate_power_map(const std::function<double(double)>& f, double L,
                           double kappa, int cells, int order, double grading);

/// Nodes (in s) and weights of the rule used by integrate_power_map, for callers
/// that need to evaluate expensive integrands once and reuse them.
Rule power_map_rule(double L, double kappa, int cells, int order, double grading);

/// Lagrange basis on `nodes` evaluated at x; out.size() == nodes.size().
void lagrange_basis(std::span<const double> nodes, std::span<const double> bary,
                    double x, std::span<double> out);
/// Barycentric weights for lagrange_basis.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Sum in a fixed pairwise tree; deterministic for a given input order.
double pairwise_sum(std::span<const double> values);

}  // namespace fsad::quad
