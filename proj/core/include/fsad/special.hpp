#pragma once

// Normal-distribution helpers with tail-stable evaluation.

namespace fsad::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
/// Upper tail 1 - Phi(x).
double normal_tail(double x) noexcept;

/// Mills ratio (1 - Phi(x)) / phi(x) for x >= 0. Continued fraction above x = 8.
double mills_ratio(double x);

/// 1 - x * mills_ratio(x) without cancellation for large x.
double one_minus_x_mills(double x);

/// Density of N(mean, var) at x; var must be positive.
double gaussian_density(double x, double mean, double var) noexcept;

/// E|Y - x| for Y ~ N(mean, var).
double folded_normal_mean(double x, double mean, double var) noexcept;

}  // namespace fsad::special
