#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "fsad/params.hpp"

namespace fsad {

/// Partition of an interval into cells, each carrying `order` Gauss-Legendre
/// nodes. A function is represented by its values at all nodes, i.e. by its
/// piecewise polynomial interpolant of degree order - 1.
class Mesh {
 public:
  static Mesh from_edges(std::vector<double> edges, int order);
  /// Uniform cells inside every gap of `breakpoints` (sorted, distinct), with
  /// about `total_cells` cells overall and at least one per gap.
  static Mesh from_breakpoints(std::span<const double> breakpoints, int total_cells, int order);

  int order() const noexcept { return order_; }
  std::size_t cells() const noexcept { return edges_.size() - 1; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const double> edges() const noexcept { return edges_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  Eigen::VectorXd sample(const std::function<double(double)>& f) const;
  /// Plain Gauss-Legendre integral of the interpolant.
  double integrate(const Eigen::VectorXd& values) const;

 private:
  Mesh(std::vector<double> edges, int order);

  int order_;
  std::vector<double> edges_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// W_ij = int int l_i(u) l_j(v) phi(u, v) du dv over the nodal basis of a mesh.
/// Neighbouring cell pairs are integrated exactly in the relative coordinate
/// u - v with a Gauss-Jacobi rule for the |u - v|^(2H-2) factor; well separated
/// pairs use the tensor Gauss-Legendre rule.
class PhiGram {
 public:
  PhiGram(const Mesh& mesh, const HurstIndex& H);

  const Eigen::MatrixXd& matrix() const noexcept { return w_; }
  double bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;

 private:
  Eigen::MatrixXd w_;
};

/// Gram matrix of a uniform mesh on [0, 1]. By homogeneity of phi the Gram
/// matrix of the same mesh stretched to [0, s] is s^(2H) times it.
class UnitGram {
 public:
  UnitGram(const HurstIndex& H, int cells, int order);

  /// int_0^s int_0^s f(u) g(v) phi(u, v) du dv.
  double bilinear(double s, const std::function<double(double)>& f,
                  const std::function<double(double)>& g) const;
  const Mesh& mesh() const noexcept { return mesh_; }

 private:
  HurstIndex H_;
  Mesh mesh_;
  PhiGram gram_;
};

/// Covariances of the centred solution at a fixed set of times, all obtained
/// from one Gram matrix on a mesh with breakpoints at every time.
class CovarianceTable {
 public:
  CovarianceTable(std::vector<double> times, const ModelParams& params, int cells, int order);

  std::span<const double> times() const noexcept { return times_; }
  const Eigen::MatrixXd& cov() const noexcept { return cov_; }
  /// sigma^2 of X_{t_i} - X_{t_j}.
  double increment_variance(std::size_t i, std::size_t j) const;
  /// Cov(X_{t_i} - X_{t_j}, X_{t_k} - X_{t_l}).
  double increment_cov(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

 private:
  std::vector<double> times_;
  Eigen::MatrixXd cov_;
};

}  // namespace fsad
