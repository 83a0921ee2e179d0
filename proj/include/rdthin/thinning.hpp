#pragma once

// Uniform thinning of a finite point set b_1 < ... < b_r: keep a uniformly
// random s-subset, each kept point carrying weight 1/r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdthin/measure.hpp"
#include "rdthin/random.hpp"

namespace rdthin {

struct ThinningSpec {
  std::vector<double> points;
  std::size_t s = 0;

  ThinningSpec() = default;
  ThinningSpec(std::vector<double> pts, std::size_t keep) : points(std::move(pts)), s(keep) {
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i] > points[i - 1])) {
        throw std::invalid_argument("ThinningSpec: points must be strictly increasing");
      }
    }
    if (s > points.size()) throw std::invalid_argument("ThinningSpec: s exceeds r");
  }

  std::size_t r() const { return points.size(); }
};

struct TestFunction {
  std::string name;
  std::function<double(double)> eval;
  double sup_norm = 1.0;
  std::optional<double> lipschitz;

  double operator()(double x) const { return eval(x); }

  /// sup_norm + lipschitz; nullopt when no Lipschitz bound is declared.
  std::optional<double> bl_norm() const {
    if (!lipschitz) return std::nullopt;
    return sup_norm + *lipschitz;
  }
};

/// Built-in test functions, addressed by name:
///   indicator:<c>  1{x <= c}            (bounded, measurable)
///   ramp:<c>       min(x / c, 1)        (Lipschitz 1/c)
///   cos:<k>        cos(2 pi k x)        (Lipschitz 2 pi k)
///   tent:<c>       max(0, 1 - |x - c|)  (BL norm 2)
inline TestFunction make_test_function(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const double arg = colon == std::string::npos ? 0.5 : std::stod(spec.substr(colon + 1));
  if (kind == "indicator") {
    return {spec, [arg](double x) { return x <= arg ? 1.0 : 0.0; }, 1.0, std::nullopt};
  }
  if (kind == "ramp") {
    if (!(arg > 0.0)) throw std::invalid_argument("ramp: scale must be positive");
    return {spec, [arg](double x) { return std::min(x / arg, 1.0); }, 1.0, 1.0 / arg};
  }
  if (kind == "cos") {
    const double w = 2.0 * 3.14159265358979323846 * arg;
    return {spec, [w](double x) { return std::cos(w * x); }, 1.0, std::abs(w)};
  }
  if (kind == "tent") {
    return {spec, [arg](double x) { return std::max(0.0, 1.0 - std::abs(x - arg)); }, 1.0, 1.0};
  }
  throw std::invalid_argument("unknown test function '" + spec + "'");
}

inline double pairing(const DiscreteMeasure& mu, const TestFunction& f) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu.weights()[i] * f(mu.atoms()[i]);
  return static_cast<double>(s);
}

/// Uniform s-subset by a partial Fisher-Yates shuffle; atoms weigh 1/r.
inline DiscreteMeasure sample_thinning(const ThinningSpec& spec, RandomStream& rng) {
  const std::size_t r = spec.r();
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.s; ++i) {
    const std::size_t j = i + rng.uniform_index(r - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<double> atoms(spec.s);
  for (std::size_t i = 0; i < spec.s; ++i) atoms[i] = spec.points[idx[i]];
  return DiscreteMeasure::uniform(std::move(atoms), r == 0 ? 0.0 : 1.0 / static_cast<double>(r));
}

inline double binomial(std::size_t r, std::size_t s) {
  if (s > r) return 0.0;
  s = std::min(s, r - s);
  double c = 1.0;
  for (std::size_t i = 1; i <= s; ++i) {
    c = c * static_cast<double>(r - s + i) / static_cast<double>(i);
  }
  return std::round(c);
}

/// Revolving-door enumeration of the t-subsets of {0, ..., n-1}: consecutive
/// subsets differ by one element leaving and one entering.
class RevolvingDoor {
 public:
  RevolvingDoor(std::size_t n, std::size_t t) : n_(n), t_(t), c_(t + 2) {
    if (t == 0 || t >= n) throw std::invalid_argument("RevolvingDoor: need 0 < t < n");
    for (std::size_t j = 1; j <= t; ++j) c_[j] = j - 1;
    c_[t + 1] = n;
  }

  /// Current subset (ascending).
  std::vector<std::size_t> current() const { return {c_.begin() + 1, c_.begin() + 1 + static_cast<std::ptrdiff_t>(t_)}; }

  /// Advances to the next subset; reports the element swapped out and in.
  /// Returns false after the last subset.
  bool next(std::size_t& out, std::size_t& in) {
    std::size_t j = 2;
    if (t_ % 2 == 1) {
      if (c_[1] + 1 < c_[2]) {
        out = c_[1];
        in = ++c_[1];
        return true;
      }
    } else {
      if (c_[1] > 0) {
        out = c_[1];
        in = --c_[1];
        return true;
      }
      goto try_increase;
    }
    for (;;) {
      if (j > t_) return false;
      // c_j == c_{j-1} + 1 here.
      if (c_[j] >= j) {
        out = c_[j];
        in = j - 2;
        c_[j] = c_[j - 1];
        c_[j - 1] = j - 2;
        return true;
      }
      ++j;
    try_increase:
      if (j > t_) return false;
      // c_{j-1} == j - 2 here.
      if (c_[j] + 1 < c_[j + 1]) {
        out = c_[j - 1];
        in = c_[j] + 1;
        c_[j - 1] = c_[j];
        c_[j] = c_[j] + 1;
        return true;
      }
      ++j;
    }
  }

 private:
  std::size_t n_;
  std::size_t t_;
  std::vector<std::size_t> c_;
};

struct TailEstimate {
  std::uint64_t exceed = 0;
  std::uint64_t trials = 0;
  double probability() const {
    return trials == 0 ? 0.0 : static_cast<double>(exceed) / static_cast<double>(trials);
  }
};

namespace detail {

inline std::vector<double> evaluate_at(const ThinningSpec& spec, const TestFunction& f) {
  std::vector<double> v(spec.r());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(spec.points[i]);
  return v;
}

/// (s/r) <nu, phi> with nu = (1/r) sum delta_{b_j}.
inline double thinning_center(const std::vector<double>& vals, std::size_t s) {
  const double r = static_cast<double>(vals.size());
  const long double total = std::accumulate(vals.begin(), vals.end(), 0.0L);
  return static_cast<double>(static_cast<long double>(s) * total / (r * r));
}

}  // namespace detail

/// Monte Carlo estimate of P(|<mu, phi> - (s/r) <nu, phi>| > eps).
inline TailEstimate deviation_tail(const ThinningSpec& spec, const TestFunction& f, double eps,
                                   std::uint64_t replicas, RandomStream& rng) {
  if (!(eps > 0.0)) throw std::invalid_argument("deviation_tail: eps must be positive");
  const auto vals = detail::evaluate_at(spec, f);
  const std::size_t r = spec.r();
  const double center = detail::thinning_center(vals, spec.s);
  std::vector<std::size_t> idx(r);
  TailEstimate est;
  est.trials = replicas;
  for (std::uint64_t k = 0; k < replicas; ++k) {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    long double sum = 0.0L;
    for (std::size_t i = 0; i < spec.s; ++i) {
      const std::size_t j = i + rng.uniform_index(r - i);
      std::swap(idx[i], idx[j]);
      sum += vals[idx[i]];
    }
    const double pair = static_cast<double>(sum / static_cast<long double>(r));
    if (std::abs(pair - center) > eps) ++est.exceed;
  }
  return est;
}

inline constexpr double kExactThinningCap = 2e6;

/// Exact P(|<mu, phi> - (s/r) <nu, phi>| > eps) over all C(r, s) subsets.
inline TailEstimate deviation_tail_exact(const ThinningSpec& spec, const TestFunction& f,
                                         double eps, double cap = kExactThinningCap) {
  if (!(eps > 0.0)) throw std::invalid_argument("deviation_tail_exact: eps must be positive");
  const std::size_t r = spec.r();
  const std::size_t s = spec.s;
  const double count = binomial(r, s);
  if (count > cap) throw std::length_error("deviation_tail_exact: C(r, s) exceeds the cap");
  const auto vals = detail::evaluate_at(spec, f);
  const double center = detail::thinning_center(vals, s);
  const long double rr = static_cast<long double>(r);
  TailEstimate est;
  est.trials = static_cast<std::uint64_t>(count);
  auto exceeds = [&](long double sum) {
    return std::abs(static_cast<double>(sum / rr) - center) > eps;
  };
  if (s == 0 || s == r) {
    const long double sum = s == 0 ? 0.0L : std::accumulate(vals.begin(), vals.end(), 0.0L);
    est.exceed = exceeds(sum) ? 1 : 0;
    return est;
  }
  RevolvingDoor door(r, s);
  auto fresh_sum = [&] {
    long double sum = 0.0L;
    for (const std::size_t i : door.current()) sum += vals[i];
    return sum;
  };
  long double sum = fresh_sum();
  std::uint64_t step = 0;
  std::size_t out = 0, in = 0;
  do {
    if (exceeds(sum)) ++est.exceed;
    if (!door.next(out, in)) break;
    // Periodic resummation bounds rounding drift of the running sum.
    if (++step % 4096 == 0) {
      sum = fresh_sum();
    } else {
      sum += static_cast<long double>(vals[in]) - vals[out];
    }
  } while (true);
  return est;
}

/// 2 exp(-r eps^2 / (64 ||phi||_inf^2)), unclamped.
inline double maurey_bound_raw(std::size_t r, double eps, double sup_norm) {
  if (r == 0 || !(eps > 0.0) || !(sup_norm > 0.0)) {
    throw std::invalid_argument("maurey_bound: need r >= 1, eps > 0, sup_norm > 0");
  }
  return 2.0 * std::exp(-static_cast<double>(r) * eps * eps / (64.0 * sup_norm * sup_norm));
}

/// The thinning bound clamped to [0, 1].
inline double maurey_bound(std::size_t r, double eps, double sup_norm) {
  return std::min(1.0, maurey_bound_raw(r, eps, sup_norm));
}

}  // namespace rdthin
