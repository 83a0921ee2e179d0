#pragma once

// Diminishing urn: w = n - r white and r red balls. Each draw removes a white
// ball and then one uniformly chosen ball among those left; drawing stops once
// no white ball remains. X_{n,r} is the terminal red count and
// d_{n,r} = (n - X_{n,r}) / 2 the number of draws.
//
// If the last white ball is removed from an urn that is otherwise empty no
// companion exists and nothing else is taken. Only odd n reach that state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rdthin/random.hpp"

namespace rdthin {

struct UrnSpec {
  std::size_t n = 0;
  std::size_t r = 0;

  UrnSpec() = default;
  UrnSpec(std::size_t n_, std::size_t r_) : n(n_), r(r_) {
    if (r > n) throw std::invalid_argument("UrnSpec: r must not exceed n");
  }
  std::size_t whites() const { return n - r; }
};

inline std::size_t simulate_urn(const UrnSpec& spec, RandomStream& rng) {
  std::size_t w = spec.whites();
  std::size_t red = spec.r;
  while (w > 0) {
    --w;
    const std::size_t left = w + red;
    if (left == 0) break;
    if (rng.uniform_index(left) < w) --w; else --red;
  }
  return red;
}

/// Law of X_{n,r}: probabilities indexed by x = 0..r.
class UrnDistribution {
 public:
  UrnDistribution(UrnSpec spec, std::vector<double> pmf) : spec_(spec), pmf_(std::move(pmf)) {}

  const UrnSpec& spec() const { return spec_; }
  const std::vector<double>& pmf() const { return pmf_; }

  double probability(std::size_t x) const { return x < pmf_.size() ? pmf_[x] : 0.0; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < pmf_.size(); ++x) {
      if (pmf_[x] > 0.0) out.push_back(x);
    }
    return out;
  }

  double total() const {
    long double s = 0.0L;
    for (const double p : pmf_) s += p;
    return static_cast<double>(s);
  }

  double mean() const {
    long double s = 0.0L;
    for (std::size_t x = 0; x < pmf_.size(); ++x) s += static_cast<long double>(x) * pmf_[x];
    return static_cast<double>(s);
  }

  double variance() const {
    const long double mu = mean();
    long double s = 0.0L;
    for (std::size_t x = 0; x < pmf_.size(); ++x) {
      const long double d = static_cast<long double>(x) - mu;
      s += d * d * pmf_[x];
    }
    return static_cast<double>(s);
  }

  /// sum_x pmf(x) e^{zx}.
  double mgf(double z) const {
    long double s = 0.0L;
    for (std::size_t x = 0; x < pmf_.size(); ++x) {
      if (pmf_[x] > 0.0) s += pmf_[x] * std::exp(static_cast<long double>(z) * x);
    }
    return static_cast<double>(s);
  }

  /// P(|X/n - center| > eps).
  double tail_x(double center, double eps) const {
    long double s = 0.0L;
    const double n = static_cast<double>(spec_.n);
    for (std::size_t x = 0; x < pmf_.size(); ++x) {
      if (std::abs(static_cast<double>(x) / n - center) > eps) s += pmf_[x];
    }
    return std::min(1.0, static_cast<double>(s));
  }

 private:
  UrnSpec spec_;
  std::vector<double> pmf_;
};

inline constexpr std::size_t kDefaultUrnCap = 5000;

/// Exact law of X_{n,r} by forward propagation. After k draws the urn holds
/// n - 2k balls, so the red count alone identifies the state; one vector over
/// red counts is advanced per draw.
inline UrnDistribution exact_pmf(const UrnSpec& spec, std::size_t cap = kDefaultUrnCap) {
  if (spec.n > cap) throw std::length_error("exact_pmf: n exceeds the configured cap");
  const std::size_t r = spec.r;
  std::vector<double> terminal(r + 1, 0.0);
  std::vector<double> cur(r + 1, 0.0), next(r + 1, 0.0);
  cur[r] = 1.0;
  for (std::size_t total = spec.n;; total -= 2) {
    std::fill(next.begin(), next.end(), 0.0);
    bool active = false;
    for (std::size_t red = 0; red <= std::min(r, total); ++red) {
      const double p = cur[red];
      if (p == 0.0) continue;
      const std::size_t w = total - red;
      const std::size_t left = total - 1;  // after the white is taken
      if (w == 0 || left == 0) {
        terminal[red] += p;
        continue;
      }
      active = true;
      next[red] += p * (static_cast<double>(w - 1) / static_cast<double>(left));
      if (red > 0) next[red - 1] += p * (static_cast<double>(red) / static_cast<double>(left));
    }
    if (!active) break;
    std::swap(cur, next);
  }
  return UrnDistribution(spec, std::move(terminal));
}

/// Number of draws implied by a terminal red count.
inline std::size_t draws_from_terminal(std::size_t n, std::size_t x) {
  if (x > n || (n - x) % 2 != 0) {
    throw std::invalid_argument("draws_from_terminal: n - X must be even and nonnegative");
  }
  return (n - x) / 2;
}

inline double urn_phi(double rho) { return rho * rho; }

inline double urn_psi(double rho) { return 2.0 * rho * rho * (1.0 - rho) * (1.0 - rho); }

/// log g_{n,r}(z) = z n phi(r/n) + (z^2 / 2) n psi(r/n).
inline double log_gaussian_ansatz(const UrnSpec& spec, double z) {
  if (spec.n == 0) return 0.0;
  const double n = static_cast<double>(spec.n);
  const double rho = static_cast<double>(spec.r) / n;
  return z * n * urn_phi(rho) + 0.5 * z * z * n * urn_psi(rho);
}

inline double gaussian_ansatz(const UrnSpec& spec, double z) {
  return std::exp(log_gaussian_ansatz(spec, z));
}

inline constexpr double kDefaultMgfUCap = 64.0;

namespace detail {

inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace detail

/// log f_{m,r}(z) for every r = 0..n at m = n, evaluated bottom-up over the
/// urn sizes m = n mod 2, ..., n with
///   f_{m,r} = (1 - r/(m-1)) f_{m-2,r} + (r/(m-1)) f_{m-2,r-1},
///   f_{m,m} = e^{mz}, f_{0,0} = 1, f_{1,0} = 1.
inline std::vector<double> log_mgf_table(std::size_t n, double z,
                                         double u_cap = kDefaultMgfUCap) {
  if (std::abs(z) * std::sqrt(static_cast<double>(n)) > u_cap) {
    throw std::overflow_error("mgf_recurrence: |z| sqrt(n) exceeds the configured cap");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> prev, cur;
  std::size_t m = n % 2;
  if (m == 0) {
    prev = {0.0};     // f_{0,0} = 1
  } else {
    prev = {0.0, z};  // f_{1,0} = 1 (lone white, no companion), f_{1,1} = e^z
  }
  for (m += 2; m <= n; m += 2) {
    cur.assign(m + 1, kNegInf);
    const double denom = static_cast<double>(m - 1);
    for (std::size_t r = 0; r < m; ++r) {
      double v = kNegInf;
      const double pw = static_cast<double>(m - 1 - r) / denom;
      const double pr = static_cast<double>(r) / denom;
      if (pw > 0.0 && r <= m - 2) v = detail::log_add(v, std::log(pw) + prev[r]);
      if (pr > 0.0) v = detail::log_add(v, std::log(pr) + prev[r - 1]);
      cur[r] = v;
    }
    cur[m] = static_cast<double>(m) * z;
    std::swap(prev, cur);
  }
  return prev;
}

inline double log_mgf_recurrence(const UrnSpec& spec, double z,
                                 double u_cap = kDefaultMgfUCap) {
  return log_mgf_table(spec.n, z, u_cap)[spec.r];
}

/// f_{n,r}(z) = E exp(z X_{n,r}).
inline double mgf_recurrence(const UrnSpec& spec, double z, double u_cap = kDefaultMgfUCap) {
  const double lf = log_mgf_recurrence(spec, z, u_cap);
  if (lf > std::log(std::numeric_limits<double>::max())) {
    throw std::overflow_error("mgf_recurrence: value overflows double; use log_mgf_recurrence");
  }
  return std::exp(lf);
}

}  // namespace rdthin
