#include "fsad/gram.hpp"

#include <algorithm>
#include <cmath>

#include "fsad/error.hpp"
#include "fsad/kernel.hpp"
#include "fsad/quadrature.hpp"

namespace fsad {

Mesh::Mesh(std::vector<double> edges, int order) : order_(order), edges_(std::move(edges)) {
  if (order_ < 1) throw DomainError("Mesh: order must be >= 1");
  if (edges_.size() < 2) throw DomainError("Mesh: need at least one cell");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) throw DomainError("Mesh: edges must be strictly increasing");
  }
  const quad::Rule gl = quad::gauss_legendre(order_);
  nodes_.reserve(cells() * order_);
  weights_.reserve(cells() * order_);
  for (std::size_t c = 0; c < cells(); ++c) {
    const double lo = edges_[c];
    const double h = edges_[c + 1] - lo;
    for (int k = 0; k < order_; ++k) {
      nodes_.push_back(lo + h * gl.nodes[k]);
      weights_.push_back(h * gl.weights[k]);
    }
  }
}

Mesh Mesh::from_edges(std::vector<double> edges, int order) { return Mesh(std::move(edges), order); }

Mesh Mesh::from_breakpoints(std::span<const double> breakpoints, int total_cells, int order) {
  if (breakpoints.size() < 2) throw DomainError("Mesh: need at least two breakpoints");
  const double span = breakpoints.back() - breakpoints.front();
  std::vector<double> edges{breakpoints.front()};
  for (std::size_t g = 1; g < breakpoints.size(); ++g) {
    const double lo = breakpoints[g - 1];
    const double hi = breakpoints[g];
    const int n = std::max(1, static_cast<int>(std::lround(total_cells * (hi - lo) / span)));
    for (int k = 1; k < n; ++k) edges.push_back(lo + (hi - lo) * k / n);
    edges.push_back(hi);
  }
  return Mesh(std::move(edges), order);
}

Eigen::VectorXd Mesh::sample(const std::function<double(double)>& f) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) v(static_cast<Eigen::Index>(i)) = f(nodes_[i]);
  return v;
}

double Mesh::integrate(const Eigen::VectorXd& values) const {
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) terms[i] = weights_[i] * values(static_cast<Eigen::Index>(i));
  return quad::pairwise_sum(terms);
}

namespace {

// Exact phi-moments of the nodal basis on one pair of neighbouring cells.
class NearField {
 public:
  NearField(int order, double gamma)
      : p_(order),
        gamma_(gamma),
        ref_(quad::gauss_legendre(order)),
        bary_(quad::barycentric_weights(ref_.nodes)),
        inner_(quad::gauss_legendre(order)),
        singular_(quad::gauss_jacobi_left(order + 1, gamma)),
        bu_(order),
        bv_(order) {}

  // Returns M(i, j) = int_U int_V l_i(u) l_j(v) |u - v|^gamma du dv.
  Eigen::MatrixXd block(double u0, double u1, double v0, double v1) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p_, p_);
    std::vector<double> rs{u0 - v1, u0 - v0, u1 - v1, u1 - v0};
    std::sort(rs.begin(), rs.end());
    const double scale = rs.back() - rs.front();
    if (rs.front() < 0.0 && rs.back() > 0.0) rs.push_back(0.0);
    std::sort(rs.begin(), rs.end());
    std::vector<double> pts;
    for (double r : rs) {
      if (pts.empty() || r - pts.back() > 1e-14 * scale) pts.push_back(r);
    }
    for (double& r : pts) {
      if (std::abs(r) <= 1e-14 * scale) r = 0.0;
    }
    for (std::size_t k = 1; k < pts.size(); ++k) piece(m, pts[k - 1], pts[k], u0, u1, v0, v1);
    return m;
  }

 private:
  void piece(Eigen::MatrixXd& m, double ra, double rb, double u0, double u1, double v0, double v1) {
    const double mid = 0.5 * (ra + rb);
    const bool lo_fixed = v0 >= u0 - mid;
    const bool hi_fixed = v1 <= u1 - mid;
    auto add = [&](double r, double weight) {
      const double lo = lo_fixed ? v0 : u0 - r;
      const double hi = hi_fixed ? v1 : u1 - r;
      const double len = hi - lo;
      for (std::size_t q = 0; q < inner_.size(); ++q) {
        const double v = lo + len * inner_.nodes[q];
        quad::lagrange_basis(ref_.nodes, bary_, (v + r - u0) / (u1 - u0), bu_);
        quad::lagrange_basis(ref_.nodes, bary_, (v - v0) / (v1 - v0), bv_);
        const double w = weight * inner_.weights[q] * len;
        for (int i = 0; i < p_; ++i) {
          const double wi = w * bu_[i];
          for (int j = 0; j < p_; ++j) m(i, j) += wi * bv_[j];
        }
      }
    };
    const double len = rb - ra;
    // Integral of |r|^gamma G(r) over [0, x] (x > 0) or [x, 0] (x < 0).
    auto from_zero = [&](double x, double sign) {
      const double ax = std::abs(x);
      const double f = sign * std::pow(ax, gamma_ + 1.0);
      for (std::size_t q = 0; q < singular_.size(); ++q) add(x * singular_.nodes[q], f * singular_.weights[q]);
    };
    if (ra == 0.0) {
      from_zero(rb, 1.0);
    } else if (rb == 0.0) {
      from_zero(ra, 1.0);
    } else {
      const double dist = ra > 0.0 ? ra : -rb;
      if (dist >= 0.25 * len) {
        const quad::Rule& rule = smooth_rule(dist / len);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const double r = ra + len * rule.nodes[q];
          add(r, rule.weights[q] * len * std::pow(std::abs(r), gamma_));
        }
      } else if (ra > 0.0) {
        // G is one polynomial on the piece, so it can be integrated from 0 and differenced.
        from_zero(rb, 1.0);
        from_zero(ra, -1.0);
      } else {
        from_zero(ra, 1.0);
        from_zero(rb, -1.0);
      }
    }
  }

  // Gauss-Legendre rule for |r|^gamma G(r) on a piece at relative distance q from 0;
  // 2p - 1 exact degrees go to G, the rest to the Bernstein-ellipse rate of |r|^gamma.
  const quad::Rule& smooth_rule(double q) {
    const double ratio = 1.0 + 2.0 * q;
    const double rho = ratio + std::sqrt(ratio * ratio - 1.0);
    const int m = std::min(kMaxNodes, static_cast<int>(std::ceil(0.5 * (37.0 / std::log(rho) + 2 * p_))));
    auto& slot = smooth_[static_cast<std::size_t>(m)];
    if (slot.size() == 0) slot = quad::gauss_legendre(m);
    return slot;
  }

  static constexpr int kMaxNodes = 64;
  int p_;
  double gamma_;
  quad::Rule ref_;
  std::vector<double> bary_;
  quad::Rule inner_;
  quad::Rule singular_;
  std::vector<quad::Rule> smooth_ = std::vector<quad::Rule>(kMaxNodes + 1);
  std::vector<double> bu_;
  std::vector<double> bv_;
};

// Tensor Gauss-Legendre on separated cells. The node count grows as the
// separation shrinks, following the Bernstein-ellipse rate of |u - v|^gamma.
class FarField {
 public:
  FarField(int order, double gamma) : p_(order), gamma_(gamma) {
    const quad::Rule ref = quad::gauss_legendre(order);
    const std::vector<double> bary = quad::barycentric_weights(ref.nodes);
    std::vector<double> row(order);
    for (int m = order; m <= kMaxNodes; ++m) {
      Level lv{quad::gauss_legendre(m), Eigen::MatrixXd(m, order)};
      for (int q = 0; q < m; ++q) {
        quad::lagrange_basis(ref.nodes, bary, lv.rule.nodes[q], row);
        for (int i = 0; i < order; ++i) lv.basis(q, i) = row[i];
      }
      levels_.push_back(std::move(lv));
    }
  }

  Eigen::MatrixXd block(double u0, double u1, double v0, double v1, double gap) {
    const double wu = u1 - u0;
    const double wv = v1 - v0;
    const double ratio = 1.0 + 2.0 * gap / std::max(wu, wv);
    const double rho = ratio + std::sqrt(ratio * ratio - 1.0);
    // The basis takes p - 1 of the 2m - 1 exact degrees; the rest must resolve phi.
    const int m = std::clamp(static_cast<int>(std::ceil(0.5 * (37.0 / std::log(rho) + p_))), p_, kMaxNodes);
    const Level& lv = levels_[static_cast<std::size_t>(m - p_)];
    Eigen::MatrixXd k(m, m);
    for (int q = 0; q < m; ++q) {
      const double u = u0 + wu * lv.rule.nodes[q];
      for (int r = 0; r < m; ++r) {
        const double v = v0 + wv * lv.rule.nodes[r];
        k(q, r) = lv.rule.weights[q] * lv.rule.weights[r] * std::pow(v - u, gamma_);
      }
    }
    return (wu * wv) * (lv.basis.transpose() * k * lv.basis);
  }

 private:
  static constexpr int kMaxNodes = 32;
  struct Level {
    quad::Rule rule;
    Eigen::MatrixXd basis;
  };
  int p_;
  double gamma_;
  std::vector<Level> levels_;
};

}  // namespace

PhiGram::PhiGram(const Mesh& mesh, const HurstIndex& H) {
  const int p = mesh.order();
  const std::size_t nc = mesh.cells();
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const double gamma = H.kernel_exponent();
  const double c = H.phi_constant();
  const auto edges = mesh.edges();
  w_.resize(n, n);
  NearField near(p, gamma);
  FarField far(p, gamma);
  for (std::size_t a = 0; a < nc; ++a) {
    for (std::size_t b = a; b < nc; ++b) {
      const double wa = edges[a + 1] - edges[a];
      const double wb = edges[b + 1] - edges[b];
      const double gap = edges[b] - edges[a + 1];
      const auto ia = static_cast<Eigen::Index>(a * p);
      const auto ib = static_cast<Eigen::Index>(b * p);
      if (gap < std::max(wa, wb)) {
        const Eigen::MatrixXd m = c * near.block(edges[a], edges[a + 1], edges[b], edges[b + 1]);
        w_.block(ia, ib, p, p) = m;
        if (a != b) w_.block(ib, ia, p, p) = m.transpose();
      } else {
        const Eigen::MatrixXd m = c * far.block(edges[a], edges[a + 1], edges[b], edges[b + 1], gap);
        w_.block(ia, ib, p, p) = m;
        w_.block(ib, ia, p, p) = m.transpose();
      }
    }
  }
  // Symmetrise the diagonal blocks against rounding in the near-field sums.
  w_ = 0.5 * (w_ + w_.transpose()).eval();
}

double PhiGram::bilinear(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return f.dot(w_ * g);
}

namespace {
Mesh unit_mesh(int cells, int order) {
  std::vector<double> edges(static_cast<std::size_t>(cells) + 1);
  for (int k = 0; k <= cells; ++k) edges[static_cast<std::size_t>(k)] = static_cast<double>(k) / cells;
  return Mesh::from_edges(std::move(edges), order);
}
}  // namespace

UnitGram::UnitGram(const HurstIndex& H, int cells, int order)
    : H_(H), mesh_(unit_mesh(cells, order)), gram_(mesh_, H) {}

double UnitGram::bilinear(double s, const std::function<double(double)>& f,
                          const std::function<double(double)>& g) const {
  if (s <= 0.0) return 0.0;
  const Eigen::VectorXd fv = mesh_.sample([&](double xi) { return f(s * xi); });
  const Eigen::VectorXd gv = mesh_.sample([&](double xi) { return g(s * xi); });
  return std::pow(s, 2.0 * H_.value()) * gram_.bilinear(fv, gv);
}

CovarianceTable::CovarianceTable(std::vector<double> times, const ModelParams& params, int cells, int order)
    : times_(std::move(times)) {
  params.validate();
  if (times_.empty()) throw DomainError("CovarianceTable: no times");
  std::vector<double> bp{0.0};
  for (double t : times_) {
    if (t < 0.0) throw DomainError("CovarianceTable: negative time");
    bp.push_back(t);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  const auto k = static_cast<Eigen::Index>(times_.size());
  if (bp.size() < 2) {
    cov_ = Eigen::MatrixXd::Zero(k, k);
    return;
  }
  const Mesh mesh = Mesh::from_breakpoints(bp, cells, order);
  const PhiGram gram(mesh, params.H);
  const auto x = mesh.nodes();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mesh.size()), k);
  for (Eigen::Index col = 0; col < k; ++col) {
    const double t = times_[static_cast<std::size_t>(col)];
    for (std::size_t i = 0; i < x.size() && x[i] < t; ++i) {
      f(static_cast<Eigen::Index>(i), col) = eval_h_or_unit(t, x[i], params.a);
    }
  }
  cov_ = f.transpose() * (gram.matrix() * f);
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

double CovarianceTable::increment_variance(std::size_t i, std::size_t j) const {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  return std::max(0.0, cov_(a, a) + cov_(b, b) - 2.0 * cov_(a, b));
}

double CovarianceTable::increment_cov(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  const auto c = static_cast<Eigen::Index>(k);
  const auto d = static_cast<Eigen::Index>(l);
  return cov_(a, c) - cov_(a, d) - cov_(b, c) + cov_(b, d);
}

}  // namespace fsad
