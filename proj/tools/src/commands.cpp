#include "fsad/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "fsad/error.hpp"
#include "fsad/fbm.hpp"
#include "fsad/gausscov.hpp"
#include "fsad/io.hpp"
#include "fsad/kernel.hpp"
#include "fsad/localtime.hpp"
#include "fsad/silt.hpp"
#include "fsad/simulate.hpp"

#ifndef FSAD_VERSION
#define FSAD_VERSION "0.0.0"
#endif

namespace fsad::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t steps_or(const RunConfig& cfg, std::size_t fallback) { return cfg.steps ? cfg.steps : fallback; }

std::vector<double> eps_or(const RunConfig& cfg, std::vector<double> fallback) {
  return cfg.eps.empty() ? fallback : cfg.eps;
}

SimMethod parse_method(const std::string& name) {
  if (name == "gaussian_exact" || name == "exact") return SimMethod::gaussian_exact;
  if (name == "representation") return SimMethod::representation;
  if (name == "euler") return SimMethod::euler;
  throw UsageError("unknown --method '" + name + "' (gaussian_exact, representation, euler)");
}

std::vector<DiffusionPath> simulate(const RunConfig& cfg, const ModelParams& p, SimMethod method, std::size_t steps) {
  const TimeGrid grid = TimeGrid::uniform(p.T, steps);
  switch (method) {
    case SimMethod::gaussian_exact:
      return simulate_gaussian_exact(p, grid, cfg.paths, cfg.seed, cfg.quad, cfg.threads);
    case SimMethod::representation:
      return simulate_representation(p, grid, cfg.paths, cfg.seed, cfg.threads);
    case SimMethod::euler:
      return simulate_euler(p, DriftSpec::linear(), grid, cfg.paths, cfg.seed, cfg.threads);
  }
  throw UsageError("unknown simulation method");
}

void require_centered(const ModelParams& p, const std::string& command) {
  if (p.nu != 0.0) throw UsageError(command + " needs --nu 0: local times are defined for the centered model");
}

class Manifest {
 public:
  Manifest(std::string command, const RunConfig& cfg, std::size_t steps) : cfg_(cfg) {
    doc_["command"] = std::move(command);
    doc_["tool_version"] = FSAD_VERSION;
    doc_["timestamp"] = utc_timestamp();
    doc_["seed"] = cfg.seed;
    doc_["parameters"] = {{"a", cfg.params.a},
                          {"nu", cfg.params.nu},
                          {"z", cfg.params.z},
                          {"hurst", cfg.params.H.value()},
                          {"T", cfg.params.T},
                          {"dim", cfg.params.d},
                          {"steps", steps},
                          {"paths", cfg.paths},
                          {"eps", cfg.eps},
                          {"threads", cfg.threads},
                          {"method", cfg.method},
                          {"quad_cells", cfg.quad.cells_per_axis},
                          {"quad_order", cfg.quad.order}};
    doc_["outputs"] = json::array();
    doc_["assumptions"] = json::array({"stochastic integrals against fBm are zero-mean divergence (Wick) integrals"});
  }

  fs::path output(const std::string& name) {
    files_.push_back(name);
    return cfg_.out_dir / name;
  }
  void note(const std::string& text) { doc_["assumptions"].push_back(text); }
  void set(const std::string& key, json value) { doc_[key] = std::move(value); }

  void write() {
    for (const auto& f : files_) doc_["outputs"].push_back({{"file", f}, {"fnv1a64", io::file_hash(cfg_.out_dir / f)}});
    std::ofstream out(cfg_.out_dir / "manifest.json");
    out << doc_.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest.json");
  }

 private:
  const RunConfig& cfg_;
  json doc_;
  std::vector<std::string> files_;
};

ExitCode cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const std::size_t steps = steps_or(cfg, 256);
  const SimMethod method = parse_method(cfg.method);
  Manifest man("simulate", cfg, steps);
  const auto paths = simulate(cfg, cfg.params, method, steps);
  write_paths_csv(man.output("paths.csv"), paths);
  for (int d = 0; d < cfg.params.d; ++d) {
    const auto rep = moment_report(paths, d);
    write_moments_csv(man.output("moments_dim" + std::to_string(d) + ".csv"), rep);
    log << "dim " << d << ": E X_T = " << rep.mean.back() << " +- " << rep.se_mean.back()
        << " (model " << model_mean(cfg.params.T, cfg.params) << "), Var X_T = " << rep.var.back() << '\n';
  }
  man.write();
  return ExitCode::success;
}

ExitCode cmd_covariance(const RunConfig& cfg, std::ostream& log) {
  const std::size_t steps = steps_or(cfg, 32);
  Manifest man("covariance", cfg, steps);
  const TimeGrid grid = TimeGrid::uniform(cfg.params.T, steps);
  const CovarianceReport report(grid, cfg.params, cfg.quad);
  report.write_csv(man.output("covariance.csv"));

  std::vector<DhRow> rows;
  if (steps >= 5) {
    for (auto c : {OrderingCase::interleaved, OrderingCase::nested, OrderingCase::disjoint}) {
      for (const auto& tp : sample_tuples(steps, 32, c, cfg.seed)) {
        rows.push_back({grid[tp.s], grid[tp.t], grid[tp.sp], grid[tp.tp], report.mu(tp.s, tp.t, tp.sp, tp.tp),
                        report.d_H(tp.s, tp.t, tp.sp, tp.tp)});
      }
    }
  }
  write_dh_csv(man.output("dh.csv"), rows);

  if (cfg.params.a > 0.0) {
    io::CsvWriter out(man.output("bounds.csv"), {"t", "l2_gap", "tail_bound", "stochastic_lhs", "stochastic_rhs",
                                                 "deterministic_lhs", "deterministic_rhs"});
    for (double t : {0.25 * cfg.params.T, 0.5 * cfg.params.T, cfg.params.T}) {
      const auto gap = l2_gap(t, cfg.params, cfg.quad, 1e7);
      const auto st = l2_stochastic_bound(t, cfg.params, cfg.quad);
      const auto de = l2_deterministic_bound(t, cfg.params, cfg.quad);
      out.row({t, gap.value, gap.tail_bound, st.lhs, st.rhs, de.lhs, de.rhs});
      log << "t = " << t << ": E|X_t - X_inf|^2 = " << gap.value << ", stochastic part " << st.lhs
          << " <= " << st.rhs << ", margin " << st.margin << '\n';
    }
  } else {
    man.note("a = 0: no limit process, bounds.csv omitted");
  }
  log << "sigma^2_T = " << report.sigma2_t().back() << '\n';
  man.write();
  return ExitCode::success;
}

double default_bandwidth(const RunConfig& cfg, const std::vector<DiffusionPath>& paths) {
  const double sd = std::sqrt(sigma2(cfg.params.T, cfg.params, cfg.quad));
  return std::max(0.05 * sd, bandwidth_guard(paths, cfg.params.T));
}

ExitCode cmd_localtime(const RunConfig& cfg, std::ostream& log) {
  require_centered(cfg.params, "localtime");
  ModelParams p = cfg.params;
  p.d = 1;
  const std::size_t steps = steps_or(cfg, 512);
  Manifest man("localtime", cfg, steps);
  man.note("local times are estimated for the first coordinate with nu = 0");
  const auto paths = simulate(cfg, p, parse_method(cfg.method), steps);
  const double guard = bandwidth_guard(paths, p.T);
  const double base = cfg.bandwidth > 0.0 ? cfg.bandwidth : default_bandwidth(cfg, paths);
  std::vector<double> levels = cfg.levels.empty() ? std::vector<double>{p.z} : cfg.levels;

  std::vector<LocalTimeRow> plain, weighted;
  const bool have_weights = p.a > 0.0;
  std::optional<WeightTable> weights;
  if (have_weights) {
    weights = WeightTable::build(*paths.front().grid, p, cfg.quad);
  } else {
    man.note("a = 0: weighted local time not computed");
  }
  for (double x : levels) {
    const double mean = analytic_mean_local_time(p.T, x, p, cfg.quad);
    const double wmean = have_weights ? analytic_mean_weighted_local_time(p.T, x, p, cfg.quad) : 0.0;
    for (double factor : {2.0, 1.0, 0.5}) {
      const double bw = factor * base;
      if (bw < guard) {
        log << "bandwidth " << bw << " below guard " << guard << ", skipped\n";
        continue;
      }
      const auto e = estimate_local_time(paths, x, p.T, bw);
      plain.push_back({x, p.T, bw, e.value, e.standard_error, mean});
      log << "L_T^" << x << " (bw " << bw << ") = " << e.value << " +- " << e.standard_error << ", analytic " << mean
          << '\n';
      if (have_weights) {
        const auto w = estimate_weighted_local_time(paths, x, p.T, bw, *weights);
        weighted.push_back({x, p.T, bw, w.value, w.standard_error, wmean});
      }
    }
  }
  write_local_time_csv(man.output("localtime.csv"), plain);
  if (have_weights) write_local_time_csv(man.output("weighted_localtime.csv"), weighted);
  man.write();
  return ExitCode::success;
}

ExitCode cmd_tanaka(const RunConfig& cfg, std::ostream& log) {
  require_centered(cfg.params, "tanaka");
  Manifest man("tanaka", cfg, 0);
  std::vector<double> levels = cfg.levels.empty() ? std::vector<double>{cfg.params.z, cfg.params.z + 0.5} : cfg.levels;
  std::vector<TanakaTerms> rows;
  for (double t : {0.5 * cfg.params.T, cfg.params.T}) {
    for (double x : levels) {
      rows.push_back(tanaka_terms(t, x, cfg.params, cfg.quad));
      const auto& r = rows.back();
      log << "t = " << t << ", x = " << x << ": E|X_t - x| = " << r.e_abs << ", residual " << r.residual << '\n';
    }
  }
  write_tanaka_csv(man.output("tanaka.csv"), rows);
  man.write();
  return ExitCode::success;
}

ExitCode cmd_silt(const RunConfig& cfg, std::ostream& log) {
  require_centered(cfg.params, "silt");
  ModelParams p = cfg.params;
  p.d = 2;
  const std::size_t steps = steps_or(cfg, 512);
  const auto eps = eps_or(cfg, {0.5, 0.2, 0.1});
  Manifest man("silt", cfg, steps);
  man.note("planar process (dimension 2) with heat-kernel regularization");
  const auto paths = simulate(cfg, p, parse_method(cfg.method), steps);
  auto rows = estimate_beta_mc(paths, eps, cfg.threads);
  const auto mean = analytic_mean_beta(eps, p, cfg.quad, cfg.threads);
  const SiltGrid grid(p, 128, cfg.quad);
  const auto var = analytic_var_beta(eps, grid, cfg.threads);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].analytic_mean = mean[i];
    rows[i].analytic_var = var[i].value;
    log << "eps = " << eps[i] << ": E beta = " << rows[i].mc_mean << " +- " << rows[i].mc_se << " (analytic "
        << mean[i] << "), Var beta = " << rows[i].mc_var << " (analytic " << var[i].value << ")\n";
  }
  write_silt_csv(man.output("silt.csv"), rows);
  man.write();
  return ExitCode::success;
}

ExitCode cmd_silt_converge(const RunConfig& cfg, std::ostream& log) {
  ModelParams p = cfg.params;
  p.d = 2;
  const std::size_t steps = steps_or(cfg, 128);
  auto eps = eps_or(cfg, {0.4, 0.2, 0.1, 0.05, 0.025});
  std::sort(eps.begin(), eps.end(), std::greater<>());
  Manifest man("silt-converge", cfg, steps);
  man.note("variance integral on a uniform " + std::to_string(steps) + "-step triangle grid");
  const auto rows = convergence_study(eps, p, cfg.quad, steps, cfg.threads);
  write_convergence_csv(man.output("silt_converge.csv"), rows);
  bool shrinking = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i >= 2 && rows[i].delta_prev >= rows[i - 1].delta_prev) shrinking = false;
    log << "eps = " << rows[i].epsilon << ": Var = " << rows[i].analytic_var << ", delta " << rows[i].delta_prev
        << ", grid error " << rows[i].indicator << '\n';
  }
  log << (shrinking ? "differences shrink along the sequence\n" : "differences do not shrink along the sequence\n");
  man.set("differences_shrink", shrinking);
  man.write();
  return ExitCode::success;
}

ExitCode cmd_verify(const RunConfig& cfg, std::ostream& log) {
  Manifest man("verify", cfg, 0);
  const auto results = run_acceptance(cfg.tier, cfg.threads, cfg.out_dir / "work", log);
  io::CsvWriter out(man.output("verify.csv"), {"criterion", "lhs", "rhs", "margin", "pass", "seconds"});
  bool ok = true;
  json list = json::array();
  for (const auto& r : results) {
    out.row({static_cast<double>(r.id), r.lhs, r.rhs, r.margin, r.pass ? 1.0 : 0.0, r.seconds});
    list.push_back({{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    ok = ok && r.pass;
  }
  man.set("tier", cfg.tier == Tier::quick ? "quick" : "full");
  man.set("criteria", list);
  man.write();
  log << (ok ? "all criteria passed\n" : "some criteria failed\n");
  return ok ? ExitCode::success : ExitCode::criterion_failure;
}

}  // namespace

ExitCode run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  cfg.params.validate();
  cfg.quad.validate();
  if (cfg.paths == 0) throw UsageError("--paths must be positive");
  fs::create_directories(cfg.out_dir);
  if (command == "simulate") return cmd_simulate(cfg, log);
  if (command == "covariance") return cmd_covariance(cfg, log);
  if (command == "localtime") return cmd_localtime(cfg, log);
  if (command == "tanaka") return cmd_tanaka(cfg, log);
  if (command == "silt") return cmd_silt(cfg, log);
  if (command == "silt-converge") return cmd_silt_converge(cfg, log);
  if (command == "verify") return cmd_verify(cfg, log);
  throw UsageError("unknown command '" + command + "'");
}

std::vector<fs::path> write_quick_artifacts(const fs::path& dir, int threads) {
  fs::create_directories(dir);
  std::vector<fs::path> files;
  auto out = [&](const std::string& name) {
    files.push_back(dir / name);
    return files.back();
  };
  ModelParams p;
  p.a = 1.0;
  p.H = HurstIndex(0.6);
  const QuadratureSpec quad;
  const std::uint64_t seed = 777;
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);

  write_fbm_csv(out("fbm.csv"), generate_fbm(grid, p.H, seed, 64, FbmMethod::circulant, threads));
  const auto exact = simulate_gaussian_exact(p, grid, 64, seed, quad, threads);
  write_paths_csv(out("paths_exact.csv"), exact);
  write_moments_csv(out("moments_exact.csv"), moment_report(exact));
  write_paths_csv(out("paths_representation.csv"), simulate_representation(p, grid, 64, seed, threads));
  write_paths_csv(out("paths_euler.csv"), simulate_euler(p, DriftSpec::linear(), grid, 64, seed, threads));

  CovarianceReport(TimeGrid::uniform(1.0, 16), p, quad).write_csv(out("covariance.csv"));

  const auto lt_paths = simulate_gaussian_exact(p, TimeGrid::uniform(1.0, 128), 256, seed, quad, threads);
  const double bw = 2.0 * bandwidth_guard(lt_paths, 1.0);
  const auto lt = estimate_local_time(lt_paths, 0.0, 1.0, bw);
  write_local_time_csv(out("localtime.csv"),
                       {{0.0, 1.0, bw, lt.value, lt.standard_error, analytic_mean_local_time(1.0, 0.0, p, quad)}});

  ModelParams p2 = p;
  p2.d = 2;
  const double eps[] = {0.5, 0.2};
  auto silt = estimate_beta_mc(simulate_gaussian_exact(p2, TimeGrid::uniform(1.0, 128), 64, seed, quad, threads), eps,
                               threads);
  const SiltGrid sg(p2, 32, quad);
  const auto var = analytic_var_beta(eps, sg, threads);
  for (std::size_t i = 0; i < silt.size(); ++i) silt[i].analytic_var = var[i].value;
  write_silt_csv(out("silt.csv"), silt);
  return files;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"fsad: self-attracting diffusions driven by fractional Brownian motion"};
  app.set_config("--config", "", "INI file; keys mirror the long flag names, flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  double a = cfg.params.a, nu = cfg.params.nu, z = cfg.params.z, hurst = 0.6, T = cfg.params.T;
  int dim = 1;
  std::string out_dir = cfg.out_dir.string();
  bool quick = false, full = false;
  app.add_option("--a", a, "attraction strength a >= 0")->capture_default_str();
  app.add_option("--nu", nu, "constant drift")->capture_default_str();
  app.add_option("--z", z, "starting point")->capture_default_str();
  app.add_option("--hurst", hurst, "Hurst index in (1/2, 1)")->capture_default_str();
  app.add_option("--T", T, "horizon")->capture_default_str();
  app.add_option("--dim", dim, "dimension (1 or 2)")->capture_default_str();
  app.add_option("--steps", cfg.steps, "grid steps (0 picks the command default)");
  app.add_option("--paths", cfg.paths, "Monte Carlo paths")->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--eps", cfg.eps, "regularization list, comma separated")->delimiter(',');
  app.add_option("--levels", cfg.levels, "local time levels, comma separated")->delimiter(',');
  app.add_option("--bandwidth", cfg.bandwidth, "local time bandwidth (0 = max(0.05 sigma_T, guard))");
  app.add_option("--method", cfg.method, "gaussian_exact, representation or euler")->capture_default_str();
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--cells", cfg.quad.cells_per_axis, "quadrature cells")->capture_default_str();
  app.add_option("--order", cfg.quad.order, "quadrature nodes per cell")->capture_default_str();
  app.add_flag("--quick", quick, "verify: quick tier");
  app.add_flag("--full", full, "verify: full tier");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "simulate paths and write paths.csv and moments"},
      {"covariance", "covariance structure and convergence bounds"},
      {"localtime", "local time and weighted local time estimates"},
      {"tanaka", "Tanaka identity terms in expectation"},
      {"silt", "self-intersection local time, Monte Carlo against quadrature"},
      {"silt-converge", "variance of the regularized self-intersection local time along eps"},
      {"verify", "run the acceptance suite"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  std::string command = app.get_subcommands().front()->get_name();
  try {
    if (quick && full) throw UsageError("--quick and --full are exclusive");
    cfg.tier = full ? Tier::full : Tier::quick;
    cfg.params.a = a;
    cfg.params.nu = nu;
    cfg.params.z = z;
    cfg.params.H = HurstIndex(hurst);
    cfg.params.T = T;
    cfg.params.d = dim;
    cfg.out_dir = out_dir;
    return static_cast<int>(run_command(command, cfg, std::cout));
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const NumericError& e) {
    std::cerr << command << ": " << e.what() << " (estimate " << e.estimate() << ", indicator " << e.indicator()
              << ")\n";
    return static_cast<int>(ExitCode::numeric);
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return static_cast<int>(ExitCode::numeric);
  }
}

}  // namespace fsad::cli
