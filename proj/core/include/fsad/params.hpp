#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fsad {

/// Hurst index restricted to the long-memory range 1/2 < H < 1.
class HurstIndex {
 public:
  explicit HurstIndex(double value);
  double value() const noexcept { return value_; }
  /// 2H - 2, the exponent of the singular kernel |u - v|^(2H-2).
  double kernel_exponent() const noexcept { return 2.0 * value_ - 2.0; }
  /// H(2H - 1), the normalisation of phi.
  double phi_constant() const noexcept { return value_ * (2.0 * value_ - 1.0); }

  friend bool operator==(const HurstIndex&, const HurstIndex&) = default;

 private:
  double value_;
};

/// Strictly increasing times starting at 0.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> points);

  static TimeGrid uniform(double horizon, std::size_t steps);

  std::span<const double> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const noexcept { return points_[i]; }
  double back() const noexcept { return points_.back(); }
  bool is_uniform(double rel_tol = 1e-12) const noexcept;
  /// Step of a uniform grid (throws UnsupportedError when the grid is not uniform).
  double step() const;

 private:
  std::vector<double> points_;
};

/// Constants of X_t = B^H_t - a int_0^t int_0^s (X_s - X_u) du ds + nu t, X_0 = z.
struct ModelParams {
  double a = 1.0;
  double nu = 0.0;
  double z = 0.0;
  HurstIndex H{0.6};
  double T = 1.0;
  int d = 1;

  /// Checks a >= 0, T > 0, d in {1,2}. a == 0 is accepted as the fBm reduction.
  void validate() const;
  /// Throws DomainError unless a > 0; required by every kernel quadrature.
  void require_attraction() const;
  /// Throws DomainError unless nu == 0 (local times and self-intersections).
  void require_centered() const;
};

/// Controls the product-integration engine used for all phi-weighted integrals.
struct QuadratureSpec {
  int cells_per_axis = 24;  ///< target number of cells across the integration span
  int order = 8;            ///< interpolation nodes per cell
  double grading = 2.0;     ///< power-law grading exponent toward singular endpoints
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  int max_refinements = 1;  ///< cell doublings used to estimate the error; 0 disables the check

  void validate() const;
  QuadratureSpec refined(int factor = 2) const;
};

}  // namespace fsad
