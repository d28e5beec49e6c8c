#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "fsad/params.hpp"

namespace fsad {

enum class SimMethod { gaussian_exact, representation, euler };

const char* to_string(SimMethod m) noexcept;

struct DiffusionPath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<std::vector<double>> values;  ///< values[dim][k]
  ModelParams params;
  SimMethod method = SimMethod::gaussian_exact;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

/// Interaction term of the drift. Linear means Phi(x) = -a x plus the constant nu.
struct DriftSpec {
  enum class Kind { linear, custom };
  Kind kind = Kind::linear;
  std::function<double(double)> phi;  ///< custom interaction, applied per coordinate
  double lipschitz = 0.0;

  static DriftSpec linear() { return {}; }
  static DriftSpec custom(std::function<double(double)> f, double lipschitz_constant);
};

std::vector<DiffusionPath> simulate_gaussian_exact(const ModelParams& params, const TimeGrid& grid,
                                                   std::size_t n_paths, std::uint64_t seed,
                                                   const QuadratureSpec& quad, int threads = 1);
std::vector<DiffusionPath> simulate_representation(const ModelParams& params, const TimeGrid& grid,
                                                   std::size_t n_paths, std::uint64_t seed, int threads = 1);
std::vector<DiffusionPath> simulate_euler(const ModelParams& params, const DriftSpec& drift,
                                          const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                                          int threads = 1);

/// Mean of X_t: z + nu int_0^t h(t, s) ds.
double model_mean(double t, const ModelParams& params);

struct MomentReport {
  std::vector<double> t;
  std::vector<double> mean, se_mean, var, se_var;
  std::size_t n_paths = 0;
};

MomentReport moment_report(const std::vector<DiffusionPath>& paths, int dim = 0);
/// Header `t,mean,se_mean,var,se_var`.
void write_moments_csv(const std::filesystem::path& path, const MomentReport& report);
/// Header `path_index,dim,t,value`.
void write_paths_csv(const std::filesystem::path& path, const std::vector<DiffusionPath>& paths);

struct SupDecayRow {
  int horizon = 0;  ///< n: the window is [n, n + 1]
  double epsilon = 0.0;
  double sup_freq = 0.0;
  double sup_se = 0.0;
  double point_freq = 0.0;  ///< frequency of |X_n - X_end| > epsilon
  double point_se = 0.0;
  double gap_var = 0.0;     ///< quadrature variance of X_n - X_end
  double tail_bound = 0.0;  ///< 2 exp(-epsilon^2 / (2 gap_var))
  double drop_se = 0.0;     ///< SE of the paired change in sup_freq to the next horizon
};

/// Exceedance frequencies of sup_{[n, n+1]} |X_t - X_end| with X_end = X at params.T,
/// using exact Gaussian paths on a grid of `steps_per_unit` points per unit time.
std::vector<SupDecayRow> sup_decay_study(const ModelParams& params, std::size_t n_paths, std::uint64_t seed,
                                         const std::vector<int>& horizons, const std::vector<double>& epsilons,
                                         int steps_per_unit, const QuadratureSpec& quad, int threads = 1);

}  // namespace fsad
