#pragma once

// Small statistics helpers: binomial confidence limits, goodness of fit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace rdthin {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489;

/// Upper end of the Wilson score interval for k successes in n trials.
inline double wilson_upper(std::uint64_t k, std::uint64_t n, double z = kZ99) {
  if (n == 0) return 1.0;
  if (k > n) throw std::invalid_argument("wilson_upper: k > n");
  if (k == n) return 1.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double center = p + z2 / (2 * nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return std::clamp((center + half) / (1 + z2 / nn), p, 1.0);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// sup_x |G(x) - Phi(x)| for the law with atoms (x_i - center) / scale and
/// probabilities p_i. Checked at each atom and just below it.
inline double ks_distance_normal(const std::vector<double>& values,
                                 const std::vector<double>& probs, double center, double scale) {
  if (values.size() != probs.size()) throw std::invalid_argument("ks_distance_normal: size mismatch");
  if (!(scale > 0.0)) throw std::invalid_argument("ks_distance_normal: scale must be positive");
  double cum = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double phi = normal_cdf((values[i] - center) / scale);
    sup = std::max(sup, std::abs(cum - phi));
    cum += probs[i];
    sup = std::max(sup, std::abs(cum - phi));
  }
  return sup;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of counts against cell probabilities. Cells with
/// zero probability must have zero counts.
inline ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& counts,
                                       const std::vector<double>& probs) {
  if (counts.size() != probs.size()) throw std::invalid_argument("chi_square_test: size mismatch");
  std::uint64_t total = 0;
  for (const auto c : counts) total += c;
  ChiSquareResult res;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] != 0) return {INFINITY, 0, 0.0};
      continue;
    }
    const double e = probs[i] * static_cast<double>(total);
    const double d = static_cast<double>(counts[i]) - e;
    res.statistic += d * d / e;
    ++cells;
  }
  if (cells < 2) return res;
  res.dof = cells - 1;
  boost::math::chi_squared dist(static_cast<double>(res.dof));
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

/// Largest root of n eps = 4 C log n, or 1 when there is none.
inline double n_epsilon(double eps, double c = 1.0) {
  if (!(eps > 0.0) || !(c > 0.0)) throw std::invalid_argument("n_epsilon: eps and C must be positive");
  auto f = [&](double n) { return n * eps - 4.0 * c * std::log(n); };
  double lo = std::max(1.0, 4.0 * c / eps);  // minimizer of f
  if (f(lo) >= 0.0) return 1.0;
  double hi = 2.0 * lo;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

/// Least-squares slope of y on x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty input");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace rdthin
