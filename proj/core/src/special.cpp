#include "fsad/special.hpp"

#include <cmath>

#include "fsad/error.hpp"

namespace fsad::special {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrtPiOver2 = 1.25331413731550025121;
constexpr double kContinuedFractionSwitch = 8.0;

// q_1 of the Laplace continued fraction M(x) = 1/(x + q_1), q_k = k/(x + q_{k+1}).
double laplace_tail(double x) {
  double q = 0.0;
  for (int k = 80; k >= 1; --k) q = k / (x + q);
  return q;
}
}  // namespace

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_tail(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double mills_ratio(double x) {
  if (std::isnan(x)) throw DomainError("mills_ratio: NaN argument");
  if (x > kContinuedFractionSwitch) return 1.0 / (x + laplace_tail(x));
  return kSqrtPiOver2 * std::exp(0.5 * x * x) * std::erfc(x * kInvSqrt2);
}

double one_minus_x_mills(double x) {
  if (x < 0.0) throw DomainError("one_minus_x_mills: negative argument");
  if (x > kContinuedFractionSwitch) {
    const double q = laplace_tail(x);
    return q / (x + q);
  }
  return 1.0 - x * mills_ratio(x);
}

double gaussian_density(double x, double mean, double var) noexcept {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
}

double folded_normal_mean(double x, double mean, double var) noexcept {
  const double delta = mean - x;
  if (var <= 0.0) return std::abs(delta);
  const double sd = std::sqrt(var);
  return sd * std::sqrt(2.0 / kPi) * std::exp(-0.5 * delta * delta / var) +
         delta * (1.0 - 2.0 * normal_cdf(-delta / sd));
}

}  // namespace fsad::special
