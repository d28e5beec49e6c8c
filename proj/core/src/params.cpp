#include "fsad/params.hpp"

#include <cmath>
#include <string>

#include "fsad/error.hpp"

namespace fsad {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.5 && value < 1.0)) {
    throw DomainError("Hurst index must satisfy 1/2 < H < 1, got " + std::to_string(value));
  }
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("time grid must contain at least one point");
  if (points_.front() != 0.0) throw DomainError("time grid must start at 0");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) throw DomainError("time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0) throw DomainError("uniform grid needs horizon > 0 and steps >= 1");
  std::vector<double> p(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    p[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  }
  return TimeGrid(std::move(p));
}

bool TimeGrid::is_uniform(double rel_tol) const noexcept {
  if (points_.size() < 3) return true;
  const double dt = points_[1] - points_[0];
  for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
    if (std::abs((points_[i + 1] - points_[i]) - dt) > rel_tol * dt * 64) return false;
  }
  return true;
}

double TimeGrid::step() const {
  if (points_.size() < 2) throw UnsupportedError("grid with a single point has no step");
  if (!is_uniform()) throw UnsupportedError("operation requires a uniform time grid");
  return points_.back() / static_cast<double>(points_.size() - 1);
}

void ModelParams::validate() const {
  if (!(a >= 0.0)) throw DomainError("attraction strength a must be >= 0");
  if (!(T > 0.0)) throw DomainError("horizon T must be positive");
  if (d != 1 && d != 2) throw DomainError("dimension d must be 1 or 2");
  if (!std::isfinite(nu) || !std::isfinite(z)) throw DomainError("nu and z must be finite");
}

void ModelParams::require_attraction() const {
  if (!(a > 0.0)) throw DomainError("kernel quadrature requires a > 0 (use a tiny a for the fBm limit)");
}

void ModelParams::require_centered() const {
  if (nu != 0.0) throw DomainError("local-time and self-intersection operations require nu = 0");
}

void QuadratureSpec::validate() const {
  if (cells_per_axis < 8) throw DomainError("QuadratureSpec.cells_per_axis must be >= 8");
  if (order < 2 || order > 24) throw DomainError("QuadratureSpec.order must be in [2, 24]");
  if (!(grading >= 1.0)) throw DomainError("QuadratureSpec.grading must be >= 1");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("QuadratureSpec tolerances must be positive");
  if (max_refinements < 0) throw DomainError("QuadratureSpec.max_refinements must be >= 0");
}

QuadratureSpec QuadratureSpec::refined(int factor) const {
  QuadratureSpec out = *this;
  out.cells_per_axis *= factor;
  return out;
}

}  // namespace fsad
