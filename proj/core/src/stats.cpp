#include "fsad/stats.hpp"

#include <algorithm>
#include <cmath>

#include "fsad/error.hpp"
#include "fsad/quadrature.hpp"

namespace fsad::stats {

Summary summarize(std::span<const double> x) {
  Summary s;
  s.n = x.size();
  if (s.n == 0) return s;
  const double n = static_cast<double>(s.n);
  s.mean = quad::pairwise_sum(x) / n;
  std::vector<double> d2(s.n), d4(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double d = x[i] - s.mean;
    d2[i] = d * d;
    d4[i] = d2[i] * d2[i];
  }
  const double m2 = quad::pairwise_sum(d2) / n;
  const double m4 = quad::pairwise_sum(d4) / n;
  s.var = s.n > 1 ? m2 * n / (n - 1.0) : 0.0;
  s.se_mean = std::sqrt(s.var / n);
  s.se_var = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return s;
}

CovEstimate covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("covariance: need equal sizes >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = quad::pairwise_sum(x) / n;
  const double my = quad::pairwise_sum(y) / n;
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = (x[i] - mx) * (y[i] - my);
  const Summary s = summarize(p);
  return CovEstimate{s.mean * n / (n - 1.0), s.se_mean};
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw DomainError("ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_two_sample(std::size_t n, std::size_t m) {
  const double a = static_cast<double>(n);
  const double b = static_cast<double>(m);
  return 1.628 * std::sqrt((a + b) / (a * b));
}

double ks_critical_one_sample(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace fsad::stats
