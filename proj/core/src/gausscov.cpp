#include "fsad/gausscov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fsad/error.hpp"
#include "fsad/io.hpp"
#include "fsad/kernel.hpp"
#include "fsad/quadrature.hpp"
#include "fsad/rng.hpp"
#include "fsad/special.hpp"
#include "refine.hpp"

namespace fsad {

double phi(double u, double v, const HurstIndex& H) {
  if (u == v) throw DomainError("phi is singular on the diagonal; use cell moments");
  return H.phi_constant() * std::pow(std::abs(u - v), H.kernel_exponent());
}

namespace {

std::vector<double> sorted_breakpoints(std::initializer_list<double> ends, std::span<const double> extra) {
  std::vector<double> bp(ends);
  const double lo = *std::min_element(bp.begin(), bp.end());
  const double hi = *std::max_element(bp.begin(), bp.end());
  for (double x : extra) {
    if (x > lo && x < hi) bp.push_back(x);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

double pow2h(double x, double H) { return std::pow(std::abs(x), 2.0 * H); }

void require_time(double t, const ModelParams& params, const char* what) {
  if (t < 0.0 || t > params.T * (1.0 + 1e-12)) throw DomainError(std::string(what) + ": time outside [0, T]");
}

// h(t, u) on (0, t], zero elsewhere; a == 0 gives the fBm indicator.
double kernel_on(double t, double u, double a) { return (u > 0.0 && u <= t) ? eval_h_or_unit(t, u, a) : 0.0; }

}  // namespace

double cell_moment(Interval u, Interval v, const HurstIndex& H, MomentDegree degree) {
  if (!(u.hi >= u.lo && v.hi >= v.lo)) throw DomainError("cell_moment: empty interval");
  const double h = H.value();
  if (degree == MomentDegree::k00) {
    return 0.5 * (pow2h(u.lo - v.hi, h) + pow2h(u.hi - v.lo, h) - pow2h(u.hi - v.hi, h) - pow2h(u.lo - v.lo, h));
  }
  if (u.hi == u.lo || v.hi == v.lo) return 0.0;
  const int p = (degree == MomentDegree::k10 || degree == MomentDegree::k11) ? 1 : 0;
  const int q = (degree == MomentDegree::k01 || degree == MomentDegree::k11) ? 1 : 0;
  const std::vector<double> bp = sorted_breakpoints({u.lo, u.hi, v.lo, v.hi}, {});
  const Mesh mesh = Mesh::from_breakpoints(bp, 1, 2);
  const PhiGram gram(mesh, H);
  const Eigen::VectorXd f = mesh.sample([&](double x) { return (x > u.lo && x < u.hi) ? (p ? x : 1.0) : 0.0; });
  const Eigen::VectorXd g = mesh.sample([&](double x) { return (x > v.lo && x < v.hi) ? (q ? x : 1.0) : 0.0; });
  return gram.bilinear(f, g);
}

double weighted_double_integral(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                Interval u_domain, Interval v_domain, const HurstIndex& H,
                                const QuadratureSpec& quad, std::span<const double> breakpoints) {
  if (!(u_domain.hi > u_domain.lo) || !(v_domain.hi > v_domain.lo)) return 0.0;
  const std::vector<double> bp =
      sorted_breakpoints({u_domain.lo, u_domain.hi, v_domain.lo, v_domain.hi}, breakpoints);
  auto once = [&](const QuadratureSpec& q) {
    const Mesh mesh = Mesh::from_breakpoints(bp, q.cells_per_axis, q.order);
    const PhiGram gram(mesh, H);
    const Eigen::VectorXd fu =
        mesh.sample([&](double x) { return (x > u_domain.lo && x < u_domain.hi) ? f(x) : 0.0; });
    const Eigen::VectorXd gv =
        mesh.sample([&](double x) { return (x > v_domain.lo && x < v_domain.hi) ? g(x) : 0.0; });
    return gram.bilinear(fu, gv);
  };
  return detail::converge(quad, once, "weighted_double_integral");
}

double sigma2(double t, const ModelParams& params, const QuadratureSpec& quad) {
  params.validate();
  require_time(t, params, "sigma2");
  if (t == 0.0) return 0.0;
  const double H = params.H.value();
  if (params.a == 0.0) return std::pow(t, 2.0 * H);
  auto k = [&](double u) { return eval_h(t, u, params.a); };
  const double v = weighted_double_integral(k, k, {0.0, t}, {0.0, t}, params.H, quad);
  const double upper = std::pow(t, 2.0 * H);
  const double lower = std::exp(-0.5 * params.a * t * t) * upper;
  if (v < lower * (1.0 - 1e-6) || v > upper * (1.0 + 1e-6)) {
    throw NumericError("sigma2 left the interval [exp(-a t^2/2) t^2H, t^2H]", v, std::max(lower - v, v - upper));
  }
  return v;
}

double sigma2_increment(double t, double s, const ModelParams& params, const QuadratureSpec& quad) {
  params.validate();
  require_time(t, params, "sigma2_increment");
  if (!(0.0 <= s && s <= t)) throw DomainError("sigma2_increment requires 0 <= s <= t");
  if (s == t) return 0.0;
  auto g = [&](double u) { return kernel_on(t, u, params.a) - kernel_on(s, u, params.a); };
  const double bp[] = {s};
  return std::max(0.0, weighted_double_integral(g, g, {0.0, t}, {0.0, t}, params.H, quad, bp));
}

double cross_cov(double t, double s, const ModelParams& params, const QuadratureSpec& quad) {
  params.validate();
  require_time(t, params, "cross_cov");
  require_time(s, params, "cross_cov");
  if (t == 0.0 || s == 0.0) return 0.0;
  auto f = [&](double u) { return eval_h_or_unit(t, u, params.a); };
  auto g = [&](double v) { return eval_h_or_unit(s, v, params.a); };
  return weighted_double_integral(f, g, {0.0, t}, {0.0, s}, params.H, quad);
}

namespace {

struct PairMoments {
  double var_a, var_b, cov;
};

// sigma^2_{t,s}, sigma^2_{tp,sp} and mu from a single mesh, refined until all three settle.
PairMoments pair_moments(double s, double t, double sp, double tp, const ModelParams& params,
                         const QuadratureSpec& quad) {
  params.validate();
  for (double x : {s, t, sp, tp}) require_time(x, params, "mu_pair");
  if (!(s < t && sp < tp)) throw DomainError("mu_pair requires s < t and sp < tp");
  const std::vector<double> bp = sorted_breakpoints({0.0, std::max(t, tp)}, std::vector<double>{s, t, sp, tp});
  auto once = [&](const QuadratureSpec& q) {
    const Mesh mesh = Mesh::from_breakpoints(bp, q.cells_per_axis, q.order);
    const PhiGram gram(mesh, params.H);
    const Eigen::VectorXd f =
        mesh.sample([&](double u) { return kernel_on(t, u, params.a) - kernel_on(s, u, params.a); });
    const Eigen::VectorXd g =
        mesh.sample([&](double u) { return kernel_on(tp, u, params.a) - kernel_on(sp, u, params.a); });
    return PairMoments{gram.bilinear(f, f), gram.bilinear(g, g), gram.bilinear(f, g)};
  };
  quad.validate();
  PairMoments m = once(quad);
  QuadratureSpec q = quad;
  double indicator = 0.0;
  for (int r = 0; r < quad.max_refinements; ++r) {
    q = q.refined();
    const PairMoments fine = once(q);
    const double scale = std::sqrt(std::abs(fine.var_a * fine.var_b));
    indicator = std::max({std::abs(fine.var_a - m.var_a) / std::max(fine.var_a, 1e-300),
                          std::abs(fine.var_b - m.var_b) / std::max(fine.var_b, 1e-300),
                          std::abs(fine.cov - m.cov) / std::max(scale, 1e-300)});
    m = fine;
    if (indicator <= quad.rel_tol) return m;
  }
  if (quad.max_refinements > 0) throw NumericError("mu_pair: refinement budget exhausted", m.cov, indicator);
  return m;
}

}  // namespace

double mu_pair(double s, double t, double sp, double tp, const ModelParams& params, const QuadratureSpec& quad) {
  return pair_moments(s, t, sp, tp, params, quad).cov;
}

double dH(double s, double t, double sp, double tp, const ModelParams& params, const QuadratureSpec& quad) {
  const PairMoments m = pair_moments(s, t, sp, tp, params, quad);
  const double product = m.var_a * m.var_b;
  const double d = product - m.cov * m.cov;
  const double tol = std::max(quad.abs_tol, 4.0 * quad.rel_tol * product);
  if (d < -tol) throw NumericError("dH: Cauchy-Schwarz violated beyond tolerance", d, -d);
  return std::max(d, 0.0);
}

BoundCheck make_bound(double lhs, double rhs) { return BoundCheck{lhs, rhs, rhs - lhs}; }

namespace {

// Uniform cells on [0, t], refined with sqrt(a) t so the boundary layer of width
// 1/(a t) below t stays resolved.
std::vector<double> head_edges(double t, double a, int cells) {
  const int n = cells * std::max(1, static_cast<int>(std::ceil(std::sqrt(a) * t)));
  std::vector<double> e(n + 1);
  for (int k = 0; k <= n; ++k) e[k] = t * k / n;
  return e;
}

// Geometric cells on [t, L] with ratio 1 + 4 / cells.
void append_tail_edges(std::vector<double>& e, double t, double L, int cells) {
  const double ratio = 1.0 + 4.0 / cells;
  double x = t;
  while (x * ratio < L * (1.0 - 1e-12)) {
    x *= ratio;
    e.push_back(x);
  }
  e.push_back(L);
}

}  // namespace

GapEstimate l2_gap(double t, const ModelParams& params, const QuadratureSpec& quad, double tail_cut) {
  params.validate();
  params.require_attraction();
  if (!(t > 0.0)) throw DomainError("l2_gap requires t > 0");
  if (!(tail_cut >= 2.0 * t)) throw DomainError("l2_gap requires tail_cut >= 2 t");
  const double a = params.a;
  const double H = params.H.value();
  auto g = [&](double u) { return (u <= t ? eval_h(t, u, a) : 0.0) - eval_h_limit(u, a); };
  double g_l1 = 0.0;
  auto once = [&](const QuadratureSpec& q) {
    std::vector<double> edges = head_edges(t, a, q.cells_per_axis);
    append_tail_edges(edges, t, tail_cut, q.cells_per_axis);
    const Mesh mesh = Mesh::from_edges(std::move(edges), q.order);
    const PhiGram gram(mesh, params.H);
    const Eigen::VectorXd gv = mesh.sample(g);
    g_l1 = mesh.integrate(gv.cwiseAbs());
    return gram.bilinear(gv, gv);
  };
  const double stochastic = detail::converge(quad, once, "l2_gap");

  // Tail beyond L = tail_cut, using 0 < h(u) <= 1 / (a u^2).
  const double L = tail_cut;
  const double c = H * (2.0 * H - 1.0);
  const double far = c * std::pow(2.0, 2.0 - 2.0 * H) / (a * (3.0 - 2.0 * H));
  const double both = (2.0 * H / (4.0 - 2.0 * H)) * (1.0 + (2.0 * H - 1.0) / (2.0 * (3.0 - 2.0 * H))) *
                      std::pow(L, 2.0 * H - 4.0) / (a * a);
  const double inner_far = far * std::pow(L, 2.0 * H - 3.0);
  const double inner_near = H * std::pow(1.5 * L, 2.0 * H - 1.0) / (a * L * L) + far * std::pow(2.0 * L, 2.0 * H - 3.0);
  const double cross = 2.0 * (g_l1 * inner_far + inner_near / (a * L));
  GapEstimate out;
  out.tail_bound = both + cross;

  // Deterministic part: nu (int_0^t h(t,s) ds - int_0^inf h(s) ds).
  const double mean_gap = params.nu * (kernel_mean_integral(t, a) - std::sqrt(special::kPi / (2.0 * a)));
  out.value = stochastic + mean_gap * mean_gap;
  if (out.tail_bound > std::max(quad.abs_tol, quad.rel_tol * out.value)) {
    throw NumericError("l2_gap: tail beyond tail_cut exceeds tolerance; increase tail_cut", out.value,
                       out.tail_bound);
  }
  return out;
}

BoundCheck l2_stochastic_bound(double t, const ModelParams& params, const QuadratureSpec& quad) {
  params.validate();
  params.require_attraction();
  if (!(t > 0.0)) throw DomainError("l2_stochastic_bound requires t > 0");
  const double a = params.a;
  const double H = params.H.value();
  auto g = [&](double u) { return eval_h(t, u, a) - eval_h_limit(u, a); };
  auto once = [&](const QuadratureSpec& q) {
    const Mesh mesh = Mesh::from_edges(head_edges(t, a, q.cells_per_axis), q.order);
    const PhiGram gram(mesh, params.H);
    const Eigen::VectorXd gv = mesh.sample(g);
    return gram.bilinear(gv, gv);
  };
  const double lhs = detail::converge(quad, once, "l2_stochastic_bound");
  return make_bound(lhs, 2.0 * H / (a * std::pow(t, 2.0 - 2.0 * H)));
}

BoundCheck l2_deterministic_bound(double t, const ModelParams& params, const QuadratureSpec& quad) {
  params.validate();
  params.require_attraction();
  if (!(t > 0.0)) throw DomainError("l2_deterministic_bound requires t > 0");
  const double a = params.a;
  auto once = [&](const QuadratureSpec& q) {
    const Mesh mesh = Mesh::from_edges(head_edges(t, a, q.cells_per_axis), q.order);
    return mesh.integrate(mesh.sample([&](double s) { return eval_h_limit(s, a); }));
  };
  const double limit_part = detail::converge(quad, once, "l2_deterministic_bound");
  return make_bound(std::abs(kernel_mean_integral(t, a) - limit_part), 1.0 / (a * t));
}

namespace {

CovarianceTable grid_table(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad) {
  const auto pts = grid.points();
  const int gaps = static_cast<int>(grid.size()) - 1;
  return CovarianceTable(std::vector<double>(pts.begin(), pts.end()), params,
                         std::max(quad.cells_per_axis, 2 * gaps), quad.order);
}

}  // namespace

LndResult lnd_ratio(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad, int n_trials,
                    std::uint64_t seed) {
  params.validate();
  if (grid.size() < 2 || grid.size() > 24) throw DomainError("lnd_ratio: grid must have 2..24 points");
  if (n_trials < 1) throw DomainError("lnd_ratio: n_trials must be >= 1");
  const CovarianceTable table = grid_table(grid, params, quad);
  const auto n = static_cast<Eigen::Index>(grid.size() - 1);
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      S(j, k) = table.increment_cov(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(j),
                                    static_cast<std::size_t>(k + 1), static_cast<std::size_t>(k));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plain(S, Eigen::EigenvaluesOnly);
  const double top = plain.eigenvalues().maxCoeff();
  if (plain.eigenvalues().minCoeff() < -1e-10 * top) {
    throw NumericError("lnd_ratio: increment covariance is not positive semidefinite",
                       plain.eigenvalues().minCoeff(), top);
  }
  const Eigen::VectorXd d = S.diagonal();
  const Eigen::VectorXd inv_sqrt = d.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = inv_sqrt.asDiagonal() * S * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
  LndResult out;
  out.exact = es.eigenvalues().minCoeff();
  out.random_search = std::numeric_limits<double>::infinity();
  Eigen::VectorXd u(n);
  for (int trial = 0; trial < n_trials; ++trial) {
    PathStream rng(seed, static_cast<std::uint64_t>(trial));
    for (Eigen::Index j = 0; j < n; ++j) u(j) = rng.normal();
    const double num = u.dot(S * u);
    const double den = u.cwiseProduct(u).dot(d);
    out.random_search = std::min(out.random_search, num / den);
  }
  return out;
}

RatioRange increment_ratio_range(const ModelParams& params, const QuadratureSpec& quad, std::size_t n) {
  if (n < 2) throw DomainError("increment_ratio_range: need at least 2 points");
  const TimeGrid grid = TimeGrid::uniform(params.T, n - 1);
  const CovarianceTable table = grid_table(grid, params, quad);
  const double twoH = 2.0 * params.H.value();
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double ratio = table.increment_variance(j, i) / std::pow(grid[j] - grid[i], twoH);
      r.min = std::min(r.min, ratio);
      r.max = std::max(r.max, ratio);
    }
  }
  return r;
}

CovarianceReport::CovarianceReport(const TimeGrid& grid, const ModelParams& params, const QuadratureSpec& quad)
    : grid_(grid), params_(params), table_(grid_table(grid, params, quad)) {
  const std::size_t n = grid.size();
  sigma2_t_.resize(n);
  sigma2_incr_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    sigma2_t_[i] = std::max(0.0, table_.cov()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < n; ++j) {
      sigma2_incr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table_.increment_variance(i, j);
    }
  }
}

double CovarianceReport::mu(std::size_t s, std::size_t t, std::size_t sp, std::size_t tp) const {
  return table_.increment_cov(t, s, tp, sp);
}

double CovarianceReport::d_H(std::size_t s, std::size_t t, std::size_t sp, std::size_t tp) const {
  const double m = mu(s, t, sp, tp);
  const double d = table_.increment_variance(t, s) * table_.increment_variance(tp, sp) - m * m;
  return std::max(d, 0.0);
}

void CovarianceReport::write_csv(const std::filesystem::path& path) const {
  io::CsvWriter csv(path, {"t", "s", "sigma2_t", "sigma2_incr", "cross_cov"});
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      csv.row({grid_[i], grid_[j], sigma2_t_[i],
               sigma2_incr_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
               table_.cov()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    }
  }
}

void write_dh_csv(const std::filesystem::path& path, const std::vector<DhRow>& rows) {
  io::CsvWriter csv(path, {"s", "t", "sp", "tp", "mu", "dH"});
  for (const DhRow& r : rows) csv.row({r.s, r.t, r.sp, r.tp, r.mu, r.dH});
}

}  // namespace fsad
