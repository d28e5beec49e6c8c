#include "fsad/fbm.hpp"

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <complex>

#include "fsad/error.hpp"
#include "fsad/io.hpp"
#include "fsad/parallel.hpp"
#include "fsad/rng.hpp"

namespace fsad {

double fbm_covariance(double s, double t, const HurstIndex& H) {
  if (s < 0.0 || t < 0.0) throw DomainError("fbm_covariance: negative time");
  const double h2 = 2.0 * H.value();
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_covariance(long k, double dt, const HurstIndex& H) {
  if (k < 0 || !(dt > 0.0)) throw DomainError("fgn_covariance: need k >= 0 and dt > 0");
  const double h2 = 2.0 * H.value();
  const double x = static_cast<double>(k);
  return 0.5 * std::pow(dt, h2) *
         (std::pow(x + 1.0, h2) + std::pow(std::abs(x - 1.0), h2) - 2.0 * std::pow(x, h2));
}

FbmGenerator::FbmGenerator(const TimeGrid& grid, const HurstIndex& H, FbmMethod method)
    : grid_(grid), H_(H), method_(method) {
  if (grid_.size() < 2) throw DomainError("FbmGenerator: grid needs at least two points");
  const std::size_t n = grid_.size() - 1;
  if (method_ == FbmMethod::circulant) {
    if (!grid_.is_uniform()) throw UnsupportedError("circulant embedding needs a uniform grid; use cholesky");
    const double dt = grid_.step();
    const std::size_t m = 2 * n;
    std::vector<double> row(m);
    for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_covariance(static_cast<long>(k), dt, H_);
    for (std::size_t k = n + 1; k < m; ++k) row[k] = row[m - k];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, row);
    eigenvalues_.resize(m);
    double top = 0.0;
    for (std::size_t k = 0; k < m; ++k) top = std::max(top, spec[k].real());
    for (std::size_t k = 0; k < m; ++k) {
      const double lam = spec[k].real();
      if (lam < -1e-10 * top) {
        throw MethodError("circulant embedding has a negative eigenvalue beyond tolerance; use cholesky");
      }
      eigenvalues_[k] = std::max(lam, 0.0);
    }
  } else {
    if (grid_.size() > 2049) throw UnsupportedError("cholesky generator limited to 2048 grid points after 0");
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        cov(i, j) = cov(j, i) = fbm_covariance(grid_[static_cast<std::size_t>(i) + 1],
                                               grid_[static_cast<std::size_t>(j) + 1], H_);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("fBm covariance is not positive definite after rounding");
    chol_ = llt.matrixL();
  }
}

void FbmGenerator::sample(std::uint64_t seed, std::uint64_t path_index, std::uint32_t substream,
                          std::span<double> out) const {
  const std::size_t n = grid_.size() - 1;
  if (out.size() != n + 1) throw DomainError("FbmGenerator::sample: output size must equal grid size");
  PathStream rng(seed, path_index, substream);
  out[0] = 0.0;
  if (method_ == FbmMethod::circulant) {
    const std::size_t m = eigenvalues_.size();
    std::vector<std::complex<double>> w(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double re = rng.normal();
      const double im = rng.normal();
      w[k] = std::sqrt(eigenvalues_[k] / static_cast<double>(m)) * std::complex<double>(re, im);
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> y;
    fft.fwd(y, w);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += y[k].real();
      out[k + 1] = acc;
    }
  } else {
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z(i) = rng.normal();
    const Eigen::VectorXd b = chol_.triangularView<Eigen::Lower>() * z;
    for (Eigen::Index i = 0; i < dim; ++i) out[static_cast<std::size_t>(i) + 1] = b(i);
  }
}

void FbmGenerator::increments(std::uint64_t seed, std::uint64_t path_index, std::uint32_t substream,
                              std::span<double> out) const {
  const std::size_t n = grid_.size() - 1;
  if (out.size() != n) throw DomainError("FbmGenerator::increments: output size must equal step count");
  std::vector<double> v(n + 1);
  sample(seed, path_index, substream, v);
  for (std::size_t k = 0; k < n; ++k) out[k] = v[k + 1] - v[k];
}

std::vector<FbmPath> generate_fbm(const TimeGrid& grid, const HurstIndex& H, std::uint64_t seed,
                                  std::size_t n_paths, FbmMethod method, int threads) {
  if (n_paths < 1) throw DomainError("generate_fbm: n_paths must be >= 1");
  const FbmGenerator gen(grid, H, method);
  auto shared = std::make_shared<const TimeGrid>(grid);
  std::vector<FbmPath> paths(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    FbmPath& p = paths[i];
    p.grid = shared;
    p.values.resize(grid.size());
    p.hurst = H;
    p.seed = seed;
    p.path_index = i;
    gen.sample(seed, i, 0, p.values);
  });
  return paths;
}

void write_fbm_csv(const std::filesystem::path& path, const std::vector<FbmPath>& paths) {
  io::CsvWriter csv(path, {"path_index", "t", "value"});
  for (const FbmPath& p : paths) {
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      csv.row({static_cast<double>(p.path_index), (*p.grid)[k], p.values[k]});
    }
  }
}

}  // namespace fsad
