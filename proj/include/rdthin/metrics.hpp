#pragma once

// Bounded-Lipschitz distance between finite measures on [0, inf), plus the
// shift and modulus-of-continuity functionals used by the regularity checks.
//
// The test-function class is {phi : |phi| <= 1, Lip(phi) <= 1}. On the merged
// support x_1 < ... < x_k of two discrete measures the distance is the chain
// linear program
//
//   maximize  sum_i c_i phi_i
//   s.t.      |phi_i| <= 1,  |phi_{i+1} - phi_i| <= x_{i+1} - x_i,
//
// with c the signed weight difference: any feasible vector extends to an
// admissible function by linear interpolation and constant extension.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rdthin/kinetic.hpp"
#include "rdthin/measure.hpp"

namespace rdthin {

namespace detail {

struct SignedSupport {
  std::vector<double> x;
  std::vector<double> c;
};

inline SignedSupport merge_signed(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  SignedSupport out;
  out.x.reserve(mu.size() + nu.size());
  out.c.reserve(mu.size() + nu.size());
  std::size_t i = 0, j = 0;
  const auto& ma = mu.atoms();
  const auto& na = nu.atoms();
  while (i < ma.size() || j < na.size()) {
    double x = 0.0, c = 0.0;
    if (j == na.size() || (i < ma.size() && ma[i] < na[j])) {
      x = ma[i];
      c = mu.weights()[i++];
    } else if (i == ma.size() || na[j] < ma[i]) {
      x = na[j];
      c = -nu.weights()[j++];
    } else {
      x = ma[i];
      c = mu.weights()[i++] - nu.weights()[j++];
    }
    out.x.push_back(x);
    out.c.push_back(c);
  }
  return out;
}

/// Solves the chain LP through its dual. With C_i = c_1 + ... + c_i and
/// d_i = x_{i+1} - x_i, strong duality gives
///
///   min  sum_{i=1..k} |g_i - g_{i-1}| + sum_{i<k} d_i |g_i - C_i|,
///   g_0 = 0, g_k = C_k,
///
/// an L1 total-variation fit on a chain. The dynamic program
/// W_i = (W_{i-1} inf-convolved with |.|) + d_i |. - C_i| keeps W_i convex and
/// piecewise linear with breakpoints among the C_i, so breakpoints are ranked
/// once up front and the active ones tracked in a two-level bitset. Each step
/// inserts one breakpoint, walks the minimizer toward it and clips the end
/// slopes back to -1 and +1 (the inf-convolution).
class ChainDual {
 public:
  double solve(const std::vector<double>& x, const std::vector<double>& c) {
    const std::size_t k = x.size();
    if (k == 0) return 0.0;
    // Breakpoint candidates: 0 and C_1 .. C_{k-1}.
    std::vector<double> cum(k);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) cum[i] = (s += c[i]);
    const double target = cum[k - 1];
    cum[k - 1] = 0.0;
    rank_coordinates(cum);

    reset(coords_.size());
    p_ = rank_[k - 1];  // W = |g|
    add(p_, 2.0);
    sl_ = -1.0;
    m_ = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      step(rank_[i], x[i + 1] - x[i]);
    }
    return evaluate(target);
  }

 private:
  /// Dense ranks of v (equal values share a rank); LSD radix sort on the
  /// order-preserving bit pattern of the doubles.
  void rank_coordinates(const std::vector<double>& v) {
    const std::size_t k = v.size();
    keyed_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(v[i] + 0.0);  // folds -0 into +0
      keyed_[i] = {bits >> 63 ? ~bits : bits | (std::uint64_t{1} << 63), i};
    }
    constexpr unsigned kDigit = 8;
    constexpr std::uint64_t kMask = (std::uint64_t{1} << kDigit) - 1;
    std::vector<std::size_t> count(kMask + 1);
    scratch_.resize(k);
    for (unsigned shift = 0; shift < 64; shift += kDigit) {
      std::fill(count.begin(), count.end(), 0);
      for (const auto& e : keyed_) ++count[(e.key >> shift) & kMask];
      if (count[(keyed_[0].key >> shift) & kMask] == k) continue;  // digit constant
      std::size_t sum = 0;
      for (auto& cnt : count) sum += std::exchange(cnt, sum);
      for (const auto& e : keyed_) scratch_[count[(e.key >> shift) & kMask]++] = e;
      keyed_.swap(scratch_);
    }
    coords_.clear();
    rank_.assign(k, 0);
    std::uint64_t last = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == 0 || keyed_[j].key != last) coords_.push_back(v[keyed_[j].index] + 0.0);
      last = keyed_[j].key;
      rank_[keyed_[j].index] = coords_.size() - 1;
    }
  }

  void reset(std::size_t size) {
    weight_.assign(size, 0.0);
    bits_.assign((size + 63) / 64, 0);
    summary_.assign((bits_.size() + 63) / 64, 0);
    lo_ = npos;
    hi_ = 0;
  }

  void add(std::size_t i, double w) {
    weight_[i] += w;
    bits_[i / 64] |= std::uint64_t{1} << (i % 64);
    summary_[i / 4096] |= std::uint64_t{1} << ((i / 64) % 64);
    lo_ = std::min(lo_, i);
    hi_ = std::max(hi_, i);
  }

  void clear(std::size_t i) {
    weight_[i] = 0.0;
    bits_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    if (bits_[i / 64] == 0) summary_[i / 4096] &= ~(std::uint64_t{1} << ((i / 64) % 64));
    if (i == lo_) lo_ = next(i);
    if (i == hi_) hi_ = prev(i);
  }

  /// Smallest active index > i (i == npos starts from the front).
  std::size_t next(std::size_t i) const {
    std::size_t word = i == npos ? 0 : (i + 1) / 64;
    const unsigned bit = i == npos ? 0 : (i + 1) % 64;
    if (word < bits_.size() && bit != 0) {
      const std::uint64_t rest = bits_[word] & (~std::uint64_t{0} << bit);
      if (rest) return word * 64 + static_cast<std::size_t>(std::countr_zero(rest));
      ++word;
    }
    for (std::size_t sw = word / 64; sw < summary_.size(); ++sw) {
      std::uint64_t m = summary_[sw];
      if (sw == word / 64) m &= ~std::uint64_t{0} << (word % 64);
      if (m) {
        const std::size_t w = sw * 64 + static_cast<std::size_t>(std::countr_zero(m));
        return w * 64 + static_cast<std::size_t>(std::countr_zero(bits_[w]));
      }
    }
    return npos;
  }

  /// Largest active index < i (i == npos starts from the back).
  std::size_t prev(std::size_t i) const {
    const std::size_t limit = i == npos ? bits_.size() * 64 : i;
    if (limit == 0) return npos;
    std::size_t word = (limit - 1) / 64;
    const unsigned bit = (limit - 1) % 64;
    const std::uint64_t below = bits_[word] & (bit == 63 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (bit + 1)) - 1));
    if (below) return word * 64 + 63 - static_cast<std::size_t>(std::countl_zero(below));
    if (word == 0) return npos;
    --word;
    for (std::size_t sw = word / 64 + 1; sw-- > 0;) {
      std::uint64_t m = summary_[sw];
      if (sw == word / 64 && word % 64 != 63) m &= (std::uint64_t{1} << (word % 64 + 1)) - 1;
      if (m) {
        const std::size_t w = sw * 64 + 63 - static_cast<std::size_t>(std::countl_zero(m));
        return w * 64 + 63 - static_cast<std::size_t>(std::countl_zero(bits_[w]));
      }
    }
    return npos;
  }

  void step(std::size_t y, double w) {
    // Add w |g - C|.
    m_ += w * std::abs(coords_[p_] - coords_[y]);
    add(y, 2.0 * w);
    sl_ += y < p_ ? w : -w;
    // Restore p_ as the leftmost minimizer.
    if (sl_ >= 0.0) {
      while (sl_ >= 0.0) {
        const std::size_t q = prev(p_);
        if (q == npos) break;  // rounding only
        m_ -= sl_ * (coords_[p_] - coords_[q]);
        p_ = q;
        sl_ -= weight_[p_];
      }
    } else {
      while (sl_ + weight_[p_] < 0.0) {
        const std::size_t q = next(p_);
        if (q == npos) break;
        const double sr = sl_ + weight_[p_];
        m_ += sr * (coords_[q] - coords_[p_]);
        sl_ = sr;
        p_ = q;
      }
    }
    // Inf-convolution with |.|: drop weight w from each end.
    sl_ += w;
    double excess = w;
    while (excess > 0.0) {
      const std::size_t i = lo_;
      if (i == p_) {
        weight_[p_] -= excess;
        break;
      }
      const double take = std::min(weight_[i], excess);
      sl_ -= take;
      excess -= take;
      if (take == weight_[i]) clear(i); else weight_[i] -= take;
    }
    excess = w;
    while (excess > 0.0) {
      const std::size_t i = hi_;
      if (i == p_) {
        weight_[p_] -= excess;
        break;
      }
      const double take = std::min(weight_[i], excess);
      excess -= take;
      if (take == weight_[i]) clear(i); else weight_[i] -= take;
    }
  }

  /// Value of the current function at g, walking out from the minimizer.
  double evaluate(double g) const {
    double value = m_;
    double at = coords_[p_];
    if (g >= at) {
      double slope = sl_ + weight_[p_];
      for (std::size_t q = next(p_); q != npos && coords_[q] < g; q = next(q)) {
        value += slope * (coords_[q] - at);
        at = coords_[q];
        slope += weight_[q];
      }
      return value + slope * (g - at);
    }
    double slope = sl_;
    for (std::size_t q = prev(p_); q != npos && coords_[q] > g; q = prev(q)) {
      value -= slope * (at - coords_[q]);
      at = coords_[q];
      slope -= weight_[q];
    }
    return value - slope * (at - g);
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<double> coords_;
  std::vector<std::size_t> rank_;
  struct Keyed {
    std::uint64_t key;
    std::size_t index;
  };
  std::vector<Keyed> keyed_, scratch_;
  std::vector<double> weight_;
  std::vector<std::uint64_t> bits_, summary_;
  std::size_t lo_ = npos, hi_ = 0;  // extreme active indices
  std::size_t p_ = 0;
  double sl_ = 0.0;  // slope just left of p_
  double m_ = 0.0;   // value at p_
};

}  // namespace detail

/// sup { <mu - nu, phi> : |phi| <= 1, Lip(phi) <= 1 }.
inline double bl_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto merged = detail::merge_signed(mu, nu);
  detail::ChainDual lp;
  return std::max(0.0, lp.solve(merged.x, merged.c));
}

inline constexpr std::size_t kBlOracleMaxAtoms = 8;

/// Brute-force optimum of the same chain LP by enumerating its vertices.
/// A vertex fixes k independent active constraints: every maximal run of
/// tight chain constraints (phi_{i+1} - phi_i = +-d_i) must be pinned by
/// exactly one tight box constraint (phi_j = +-1) inside the run.
inline double bl_distance_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto merged = detail::merge_signed(mu, nu);
  const std::size_t k = merged.x.size();
  if (k > kBlOracleMaxAtoms) {
    throw std::length_error("bl_distance_oracle: merged support exceeds 8 atoms");
  }
  if (k == 0) return 0.0;
  std::vector<double> gap(k > 0 ? k - 1 : 0);
  for (std::size_t i = 0; i + 1 < k; ++i) gap[i] = merged.x[i + 1] - merged.x[i];

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> edge(k - 1, 0);  // 0 inactive, +1 / -1 tight with that sign
  std::vector<double> phi(k);
  constexpr double kTol = 1e-12;

  // Iterate edge states in base 3.
  std::size_t edge_patterns = 1;
  for (std::size_t i = 0; i + 1 < k; ++i) edge_patterns *= 3;
  for (std::size_t code = 0; code < edge_patterns; ++code) {
    std::size_t rem = code;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      edge[i] = static_cast<int>(rem % 3) - 1;
      rem /= 3;
    }
    // Components: maximal runs joined by tight edges.
    std::vector<std::pair<std::size_t, std::size_t>> comps;
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (edge[i] == 0) {
        comps.emplace_back(start, i);
        start = i + 1;
      }
    }
    comps.emplace_back(start, k - 1);

    // Each component picks an anchor index and a sign: mixed radix counter.
    std::vector<std::size_t> choice(comps.size(), 0);
    for (;;) {
      for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const auto [lo, hi] = comps[ci];
        const std::size_t len = hi - lo + 1;
        const std::size_t anchor = lo + choice[ci] / 2;
        phi[anchor] = choice[ci] % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = anchor; i < hi; ++i) phi[i + 1] = phi[i] + edge[i] * gap[i];
        for (std::size_t i = anchor; i > lo; --i) phi[i - 1] = phi[i] - edge[i - 1] * gap[i - 1];
        (void)len;
      }
      bool feasible = true;
      for (std::size_t i = 0; i < k && feasible; ++i) {
        if (std::abs(phi[i]) > 1.0 + kTol) feasible = false;
      }
      for (std::size_t i = 0; i + 1 < k && feasible; ++i) {
        if (std::abs(phi[i + 1] - phi[i]) > gap[i] + kTol) feasible = false;
      }
      if (feasible) {
        double val = 0.0;
        for (std::size_t i = 0; i < k; ++i) val += merged.c[i] * phi[i];
        best = std::max(best, val);
      }
      std::size_t ci = 0;
      for (; ci < comps.size(); ++ci) {
        const std::size_t radix = 2 * (comps[ci].second - comps[ci].first + 1);
        if (++choice[ci] < radix) break;
        choice[ci] = 0;
      }
      if (ci == comps.size()) break;
    }
  }
  return std::max(0.0, best);
}

/// (S_h^* mu): atoms above h move down by h; atoms at or below h leave.
inline DiscreteMeasure shift_pushforward(const DiscreteMeasure& mu, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("shift_pushforward: h must be >= 0");
  if (h == 0.0) return mu;
  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.atoms()[i] > h) {
      atoms.push_back(mu.atoms()[i] - h);
      weights.push_back(mu.weights()[i]);
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

/// omega(h; mu): largest mass in a window (x, x + h].
inline double modulus(const DiscreteMeasure& mu, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("modulus: h must be positive");
  const auto& a = mu.atoms();
  const auto& w = mu.weights();
  double best = 0.0, window = 0.0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < a.size(); ++hi) {
    window += w[hi];
    while (a[lo] <= a[hi] - h) window -= w[lo++];
    best = std::max(best, window);
  }
  return best;
}

struct Discretization {
  DiscreteMeasure measure;
  double error = 0.0;  // |d(any, limit) - d(any, measure)| <= error
};

/// m equal-mass atoms at the conditional quantile midpoints of the limit
/// measure rho(t) S_t^* F0, with a certified transport error.
inline Discretization discretize(const KineticSolution& sol, double t, std::size_t m) {
  if (m == 0) throw std::invalid_argument("discretize: m must be >= 1");
  const double rho = sol.rho(t);
  if (!(rho > 0.0)) return {};
  const InitialDensity& f0 = sol.density();
  const double base = 1.0 - rho;  // F0(t)
  // Limit CDF is G(x) = rho (F0(x + t) - F0(t)) with mass rho^2, so
  // G^{-1}(q rho^2) = F0^{-1}(F0(t) + q rho) - t.
  auto inverse = [&](double q) -> double {
    if (q <= 0.0) return 0.0;
    const double p = base + q * rho;
    if (q >= 1.0 || p >= 1.0) return f0.support_max() - t;
    return std::max(0.0, f0.quantile(p) - t);
  };
  const double md = static_cast<double>(m);
  const double cell_mass = rho * rho / md;
  std::vector<double> atoms(m);
  double err = 0.0;
  double left = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double mid = inverse((static_cast<double>(k) + 0.5) / md);
    // p rounds to 1 only when rho is below machine precision.
    atoms[k] = std::isfinite(mid) ? mid : std::max(0.0, f0.quantile(std::nextafter(1.0, 0.0)) - t);
    const double right = inverse(static_cast<double>(k + 1) / md);
    // A test function moves by at most min(2, width) within a cell; an
    // unbounded last cell counts as 2.
    err += cell_mass * std::min(2.0, right - left);
    left = right;
  }
  return {DiscreteMeasure::uniform(std::move(atoms), cell_mass), err};
}

}  // namespace rdthin
