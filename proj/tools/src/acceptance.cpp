#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include "fsad/cli/commands.hpp"
#include "fsad/error.hpp"
#include "fsad/fbm.hpp"
#include "fsad/gausscov.hpp"
#include "fsad/io.hpp"
#include "fsad/kernel.hpp"
#include "fsad/localtime.hpp"
#include "fsad/silt.hpp"
#include "fsad/simulate.hpp"
#include "fsad/special.hpp"
#include "fsad/stats.hpp"

namespace fsad::cli {

namespace fs = std::filesystem;

namespace {

// One inequality lhs <= rhs.
struct Check {
  std::string what;
  double lhs;
  double rhs;

  double margin() const { return rhs - lhs; }
  bool pass() const { return std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs; }
  double slack() const {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::isfinite(lhs) && std::isfinite(rhs) ? margin() / scale : -std::numeric_limits<double>::infinity();
  }
};

struct Context {
  Tier tier;
  int threads;
  fs::path work;
  std::ostream& log;
  bool full() const { return tier == Tier::full; }
};

using Body = std::function<void(const Context&, std::vector<Check>&, std::string&)>;

struct Criterion {
  int id;
  std::string name;
  double time_limit;
  Body body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

void fbm_covariance_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  const std::size_t n_paths = c.full() ? 10000 : 2000;
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  for (double h : {0.55, 0.65, 0.75}) {
    const HurstIndex H(h);
    const auto paths = generate_fbm(grid, H, 101, n_paths, FbmMethod::circulant, c.threads);
    std::vector<std::vector<double>> col(grid.size(), std::vector<double>(n_paths));
    for (std::size_t p = 0; p < n_paths; ++p) {
      for (std::size_t k = 0; k < grid.size(); ++k) col[k][p] = paths[p].values[k];
    }
    double worst = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      for (std::size_t j = i; j < grid.size(); ++j) {
        const auto est = stats::covariance(col[i], col[j]);
        worst = std::max(worst, std::abs(est.cov - fbm_covariance(grid[i], grid[j], H)) / est.se);
      }
    }
    out.push_back({"H=" + fmt("%.2f", h) + " max |cov - exact| / SE", worst, 4.0});
  }
  detail = std::to_string(n_paths) + " paths, 64 points, 2080 pairs per H";
}

void reduction_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1e-12;
  p.H = HurstIndex(0.6);
  p.T = 2.0;
  const QuadratureSpec quad;
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    const double exact = std::pow(t, 1.2);
    out.push_back({"sigma2 rel err t=" + fmt("%g", t), std::abs(sigma2(t, p, quad) / exact - 1.0), 1e-8});
  }

  ModelParams f;
  f.a = 0.0;
  f.nu = 0.5;
  f.z = 0.3;
  f.H = HurstIndex(0.6);
  f.T = 1.0;
  const std::size_t n_paths = c.full() ? 4000 : 1000;
  const TimeGrid grid = TimeGrid::uniform(1.0, 256);
  const std::uint64_t seed = 202;
  const std::vector<std::pair<std::string, std::vector<DiffusionPath>>> sims = {
      {"gaussian_exact", simulate_gaussian_exact(f, grid, n_paths, seed, quad, c.threads)},
      {"representation", simulate_representation(f, grid, n_paths, seed, c.threads)},
      {"euler", simulate_euler(f, DriftSpec::linear(), grid, n_paths, seed, c.threads)}};
  for (const auto& [name, paths] : sims) {
    for (std::size_t k : {std::size_t{128}, std::size_t{256}}) {
      const double t = grid[k];
      const double mean = f.z + f.nu * t;
      const double sd = std::pow(t, f.H.value());
      std::vector<double> x(paths.size());
      for (std::size_t i = 0; i < paths.size(); ++i) x[i] = paths[i].values[0][k];
      const double ks = stats::ks_one_sample(x, [&](double v) { return special::normal_cdf((v - mean) / sd); });
      out.push_back({name + " KS at t=" + fmt("%g", t), ks, stats::ks_critical_one_sample(x.size())});
    }
  }
  detail = "a = 1e-12 quadrature; a = 0 simulators with nu = 0.5, " + std::to_string(n_paths) + " paths";
}

void bracket_check(const Context&, std::vector<Check>& out, std::string& detail) {
  const QuadratureSpec quad;
  const TimeGrid grid = TimeGrid::uniform(2.0, 50);
  for (double a : {0.1, 1.0, 10.0}) {
    for (double h : {0.55, 0.65, 0.75}) {
      ModelParams p;
      p.a = a;
      p.H = HurstIndex(h);
      p.T = 2.0;
      const CovarianceReport rep(grid, p, quad);
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t = grid[k];
        const double upper = std::pow(t, 2.0 * h);
        const double lower = std::exp(-0.5 * a * t * t) * upper;
        const double s2 = rep.sigma2_t()[k];
        worst = std::min({worst, s2 - lower, upper - s2});
      }
      out.push_back({"a=" + fmt("%g", a) + " H=" + fmt("%.2f", h) + " -min margin", -worst, 1e-8});
    }
  }
  detail = "50-point grid on (0, 2]";
}

void increment_ratio_check(const Context&, std::vector<Check>& out, std::string& detail) {
  const QuadratureSpec quad;
  for (double h : {0.55, 0.65, 0.75}) {
    ModelParams p;
    p.a = 1.0;
    p.H = HurstIndex(h);
    p.T = 2.0;
    const auto range = increment_ratio_range(p, quad, 60);
    out.push_back({"H=" + fmt("%.2f", h) + " -min ratio", -range.min, 0.0});
    out.push_back({"H=" + fmt("%.2f", h) + " max ratio", range.max, 1e6});
    for (double t : {0.5, 1.0, 2.0}) {
      const double r = sigma2_increment(t, t - 1e-3, p, quad) / std::pow(1e-3, 2.0 * h);
      out.push_back({"H=" + fmt("%.2f", h) + " |ratio - 1| at lag 1e-3, t=" + fmt("%g", t), std::abs(r - 1.0), 5e-2});
    }
  }
  detail = "60 x 60 triangle, T = 2, a = 1";
}

void l2_bound_check(const Context&, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  p.T = 6.0;
  const QuadratureSpec quad;
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const auto b = l2_stochastic_bound(t, p, quad);
    out.push_back({"stochastic bound t=" + fmt("%g", t) + " (lhs - rhs)", b.lhs - b.rhs, 1e-8});
  }
  const auto gap = l2_gap(6.0, p, quad, 1e7);
  out.push_back({"l2_gap(6)", gap.value, 1e-3});
  detail = "l2_gap(6) = " + io::format_double(gap.value) + ", tail bound " + fmt("%.2g", gap.tail_bound);
}

void sup_decay_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  p.T = 5.0;
  const std::size_t n_paths = c.full() ? 1000 : 300;
  const auto rows =
      sup_decay_study(p, n_paths, 606, {1, 2, 3, 4}, {0.2}, c.full() ? 64 : 32, QuadratureSpec{}, c.threads);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out.push_back({"n=" + std::to_string(r.horizon) + " point freq - 4 SE vs Gaussian tail bound",
                   r.point_freq - 4.0 * r.point_se, r.tail_bound});
    if (i + 1 < rows.size()) {
      out.push_back({"sup freq n=" + std::to_string(rows[i + 1].horizon) + " vs n=" + std::to_string(r.horizon) +
                         " + 2 paired SE",
                     rows[i + 1].sup_freq, r.sup_freq + 2.0 * r.drop_se});
    }
  }
  detail = "sup freq:";
  for (const auto& r : rows) detail += " " + fmt("%.3f", r.sup_freq);
  detail += "; eps = 0.2, T = 5, " + std::to_string(n_paths) + " paths";
}

void lnd_check(const Context&, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  p.T = 2.0;
  const auto r = lnd_ratio(TimeGrid::uniform(2.0, 16), p, QuadratureSpec{}, 2000, 707);
  out.push_back({"-kappa0 vs -0.01", -r.exact, -0.01});
  detail = "kappa0 = " + fmt("%.4f", r.exact) + ", random search " + fmt("%.4f", r.random_search);
}

void local_time_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  const QuadratureSpec quad;
  const std::size_t n_paths = c.full() ? 10000 : 2000;
  const std::size_t steps = c.full() ? 512 : 256;
  const auto paths = simulate_gaussian_exact(p, TimeGrid::uniform(1.0, steps), n_paths, 808, quad, c.threads);
  const double bw = std::max(0.05 * std::sqrt(sigma2(1.0, p, quad)), bandwidth_guard(paths, 1.0));
  const double x = p.z;

  const auto lt = estimate_local_time(paths, x, 1.0, bw);
  const double lt_exact = analytic_mean_local_time(1.0, x, p, quad);
  out.push_back({"|E L - analytic|", std::abs(lt.value - lt_exact), std::max(4.0 * lt.standard_error, 0.05 * lt_exact)});

  const auto weights = WeightTable::build(*paths.front().grid, p, quad);
  const auto wl = estimate_weighted_local_time(paths, x, 1.0, bw, weights);
  const double wl_exact = analytic_mean_weighted_local_time(1.0, x, p, quad);
  out.push_back({"|E weighted L - analytic|", std::abs(wl.value - wl_exact),
                 std::max(4.0 * wl.standard_error, 0.05 * wl_exact)});

  // The default already sits at the resolution guard, so the sweep halves 2 bw.
  const auto wide = estimate_local_time(paths, x, 1.0, 2.0 * bw);
  out.push_back({"half-bandwidth relative shift", std::abs(wide.value - lt.value) / lt.value, 0.03});
  const auto wwide = estimate_weighted_local_time(paths, x, 1.0, 2.0 * bw, weights);
  out.push_back({"half-bandwidth relative shift (weighted)", std::abs(wwide.value - wl.value) / wl.value, 0.03});
  detail = "bandwidth " + fmt("%.4f", bw) + ", E L = " + fmt("%.4f", lt.value) + " vs " + fmt("%.4f", lt_exact) +
           " (2 bw: " + fmt("%.4f", wide.value) + ")" +
           ", E weighted L = " + fmt("%.4f", wl.value) + " vs " + fmt("%.4f", wl_exact);
}

void tanaka_check(const Context&, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  const QuadratureSpec quad;
  for (auto [t, dx] : {std::pair{0.5, 0.0}, std::pair{1.0, 0.0}, std::pair{1.0, 0.5}}) {
    const auto r = tanaka_terms(t, p.z + dx, p, quad);
    out.push_back({"|residual| at t=" + fmt("%g", t) + ", x=z+" + fmt("%g", dx), std::abs(r.residual),
                   1e-3 * r.e_abs});
  }
  for (double a : {0.0, 1e-12}) {
    ModelParams q = p;
    q.a = a;
    for (double dx : {0.0, 0.5}) {
      const auto r = tanaka_terms(1.0, q.z + dx, q, quad);
      out.push_back({"a=" + fmt("%g", a) + " |residual| x=z+" + fmt("%g", dx), std::abs(r.residual), 1e-10});
    }
  }
  detail = "weighted local time constant 2H(2H-1) closes the identity";
}

void silt_mean_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  p.d = 2;
  const QuadratureSpec quad;
  const std::size_t n_paths = c.full() ? 4000 : 400;
  const std::size_t steps = c.full() ? 512 : 256;
  const std::vector<double> eps{0.5, 0.2, 0.1};
  const auto paths = simulate_gaussian_exact(p, TimeGrid::uniform(1.0, steps), n_paths, 1010, quad, c.threads);
  const auto mc = estimate_beta_mc(paths, eps, c.threads);
  const auto exact = analytic_mean_beta(eps, p, quad, c.threads);
  detail = "";
  for (std::size_t i = 0; i < eps.size(); ++i) {
    out.push_back({"eps=" + fmt("%g", eps[i]) + " |mc - analytic|", std::abs(mc[i].mc_mean - exact[i]),
                   std::max(4.0 * mc[i].mc_se, 0.03 * exact[i])});
    detail += fmt("eps %g: ", eps[i]) + fmt("%.4f", mc[i].mc_mean) + " vs " + fmt("%.4f; ", exact[i]);
  }
  out.push_back({"means increase as eps decreases (E(0.5) - E(0.1))", mc[0].mc_mean - mc[2].mc_mean, 0.0});

  ModelParams f = p;
  f.a = 0.0;
  const double oracle = 0.30405079919836041999;
  const double v = analytic_mean_beta(0.1, f, quad);
  out.push_back({"a=0 rel err vs 1-d oracle", std::abs(v / oracle - 1.0), 1e-3});
  detail += std::to_string(n_paths) + " paths x " + std::to_string(steps) + " steps";
}

void silt_variance_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  const std::vector<double> eps{0.4, 0.2, 0.1, 0.05, 0.025};
  const std::size_t steps = 128;
  detail = "";
  for (double h : {0.55, 0.6, 0.7, 0.8}) {
    ModelParams p;
    p.a = 1.0;
    p.H = HurstIndex(h);
    p.d = 2;
    const auto rows = convergence_study(eps, p, QuadratureSpec{}, steps, c.threads);
    detail += fmt("H %.2f diffs:", h);
    for (std::size_t i = 1; i < rows.size(); ++i) detail += fmt(" %.3g", rows[i].delta_prev);
    detail += "; ";
    if (h >= 0.75) continue;  // reported only
    for (std::size_t i = 2; i < rows.size(); ++i) {
      out.push_back({"H=" + fmt("%.2f", h) + " delta(" + fmt("%g", rows[i].epsilon) + ") < delta(" +
                         fmt("%g", rows[i - 1].epsilon) + ")",
                     rows[i].delta_prev, rows[i - 1].delta_prev});
    }
  }
  detail += std::to_string(steps) + "-step grid";
}

void covariance_sweep_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  p.d = 2;
  const SiltGrid grid(p, 128, QuadratureSpec{});
  const std::size_t n = c.full() ? 10000 : 2000;
  const std::pair<OrderingCase, const char*> cases[] = {
      {OrderingCase::interleaved, "s<s'<t<t'"}, {OrderingCase::nested, "s'<s<t<t'"}, {OrderingCase::disjoint, "s<t<s'<t'"}};
  detail = "";
  for (const auto& [oc, label] : cases) {
    const auto tuples = sample_tuples(grid.steps(), n, oc, 1212);
    const auto k = dh_lower_bound_check(grid, tuples, oc);
    out.push_back({std::string("d_H lower bound ") + label + ": 1e-3 vs min ratio", 1e-3, k.min_ratio});
    detail += std::string(label) + fmt(" min %.4g; ", k.min_ratio);
  }
  const auto ts = sample_tuples(grid.steps(), n, OrderingCase::interleaved, 1213);
  const auto rs = variance_shift_check(grid, ts);
  out.push_back({"increment difference max ratio", rs.max_ratio, 1e3});
  out.push_back({"increment difference violations", static_cast<double>(rs.violations), 0.0});
  const auto tc = sample_tuples(grid.steps(), n, OrderingCase::disjoint, 1214);
  const auto rc = covariance_shift_check(grid, tc);
  out.push_back({"disjoint pair max ratio", rc.max_ratio, 1e3});
  out.push_back({"disjoint pair violations", static_cast<double>(rc.violations), 0.0});
  detail += fmt("max ratios %.4g", rs.max_ratio) + fmt(" and %.4g", rc.max_ratio);
}

void determinism_check(const Context& c, std::vector<Check>& out, std::string& detail) {
  const auto a = write_quick_artifacts(c.work / "det_threads1_a", 1);
  const auto b = write_quick_artifacts(c.work / "det_threads1_b", 1);
  const auto d = write_quick_artifacts(c.work / "det_threads4", 4);
  double mismatches = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string h = io::file_hash(a[i]);
    if (h != io::file_hash(b[i])) mismatches += 1.0;
    if (h != io::file_hash(d[i])) mismatches += 1.0;
  }
  out.push_back({"files differing across repeats and thread counts", mismatches, 0.0});
  detail = std::to_string(a.size()) + " files compared at threads 1, 1, 4";
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "fBm generator covariance", 30, fbm_covariance_check},
      {2, "a = 0 reduction", 60, reduction_check},
      {3, "variance bracket", 60, bracket_check},
      {4, "increment variance ratio", 120, increment_ratio_check},
      {5, "mean-square convergence bound", 60, l2_bound_check},
      {6, "sup-gap exceedance decay", 180, sup_decay_check},
      {7, "local nondeterminism", 60, lnd_check},
      {8, "local time oracle", 300, local_time_check},
      {9, "Tanaka identity in expectation", 120, tanaka_check},
      {10, "self-intersection mean", 600, silt_mean_check},
      {11, "self-intersection variance convergence", 900, silt_variance_check},
      {12, "increment covariance sweeps", 300, covariance_sweep_check},
      {13, "determinism", 300, determinism_check},
  };
  return list;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "criterion %2d %-4s %-40s lhs=%-13.6g rhs=%-13.6g margin=%-13.6g %7.1fs", r.id,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.lhs, r.rhs, r.margin, r.seconds);
  return std::string(buf) + (r.detail.empty() ? "" : "\n    " + r.detail);
}

std::vector<CriterionResult> run_acceptance(Tier tier, int threads, const fs::path& work_dir, std::ostream& log,
                                            const std::vector<int>& only) {
  fs::create_directories(work_dir);
  const Context ctx{tier, threads, work_dir, log};
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    std::vector<Check> checks;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(ctx, checks, r.detail);
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
      checks.push_back({"raised", 1.0, 0.0});
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    checks.push_back({"runtime seconds", r.seconds, c.time_limit});

    // Report the check with the smallest relative margin.
    const Check* shown = &checks.front();
    std::size_t failed = 0;
    for (const auto& ch : checks) {
      if (!ch.pass()) ++failed;
      if (ch.slack() < shown->slack()) shown = &ch;
    }
    r.pass = failed == 0;
    r.lhs = shown->lhs;
    r.rhs = shown->rhs;
    r.margin = shown->margin();
    std::string head = shown->what;
    if (failed > 1) head += " (" + std::to_string(failed) + " checks failed)";
    r.detail = head + (r.detail.empty() ? "" : "; " + r.detail);
    log << format_result(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace fsad::cli
