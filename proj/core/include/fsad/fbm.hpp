#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "fsad/params.hpp"

namespace fsad {

/// E[B_s B_t] = (t^2H + s^2H - |t - s|^2H) / 2.
double fbm_covariance(double s, double t, const HurstIndex& H);
/// Autocovariance at lag k of the increments of step dt.
double fgn_covariance(long k, double dt, const HurstIndex& H);

enum class FbmMethod { circulant, cholesky };

struct FbmPath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;
  HurstIndex hurst{0.6};
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

/// Precomputed factorisation for one (grid, H, method); read-only afterwards,
/// so one instance can serve many threads.
class FbmGenerator {
 public:
  FbmGenerator(const TimeGrid& grid, const HurstIndex& H, FbmMethod method);

  /// Values B_{t_0..t_n} with B_0 = 0, drawn from substream `substream` of (seed, path_index).
  void sample(std::uint64_t seed, std::uint64_t path_index, std::uint32_t substream, std::span<double> out) const;
  /// Increments B_{t_{k+1}} - B_{t_k}, k < n.
  void increments(std::uint64_t seed, std::uint64_t path_index, std::uint32_t substream,
                  std::span<double> out) const;

  const TimeGrid& grid() const noexcept { return grid_; }
  FbmMethod method() const noexcept { return method_; }
  /// Eigenvalues of the circulant embedding after clipping (empty for cholesky).
  const std::vector<double>& embedding_eigenvalues() const noexcept { return eigenvalues_; }

 private:
  TimeGrid grid_;
  HurstIndex H_;
  FbmMethod method_;
  std::vector<double> eigenvalues_;
  Eigen::MatrixXd chol_;
};

std::vector<FbmPath> generate_fbm(const TimeGrid& grid, const HurstIndex& H, std::uint64_t seed,
                                  std::size_t n_paths, FbmMethod method, int threads = 1);

/// Header `path_index,t,value`.
void write_fbm_csv(const std::filesystem::path& path, const std::vector<FbmPath>& paths);

}  // namespace fsad
