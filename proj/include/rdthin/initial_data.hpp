#pragma once

// Initial distribution F0 of particle positions on the half-line and the
// quantile placement of an n-particle configuration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rdthin {

struct Uniform01 {};

struct Exponential {
  double rate = 1.0;
};

/// Piecewise-linear CDF through (x_k, F_k). Starts at (0,0), ends at F = 1.
struct PiecewiseCdf {
  std::vector<double> x;
  std::vector<double> F;
};

/// A user-supplied CDF. Quantiles come from bisection and the modulus of
/// continuity from a grid scan, so both are numerical.
struct CustomCdf {
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;  // may be empty
  std::size_t modulus_grid = 100000;
};

class InitialDensity {
 public:
  using Family = std::variant<Uniform01, Exponential, PiecewiseCdf, CustomCdf>;

  static InitialDensity uniform01() { return InitialDensity(Uniform01{}); }

  static InitialDensity exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw std::invalid_argument("exponential: rate must be positive");
    }
    return InitialDensity(Exponential{rate});
  }

  static InitialDensity piecewise(std::vector<double> x, std::vector<double> F) {
    if (x.size() != F.size() || x.size() < 2) {
      throw std::invalid_argument("piecewise: need at least two (x, F) rows");
    }
    if (x.front() != 0.0 || F.front() != 0.0) {
      throw std::invalid_argument("piecewise: table must start at (0, 0)");
    }
    for (std::size_t k = 1; k < x.size(); ++k) {
      if (!(x[k] > x[k - 1])) {
        throw std::invalid_argument("piecewise: x column must be strictly increasing");
      }
      if (!(F[k] >= F[k - 1])) {
        throw std::invalid_argument("piecewise: F column must be nondecreasing");
      }
    }
    if (F.back() != 1.0) {
      throw std::invalid_argument("piecewise: F column must end at 1 (normalized mass)");
    }
    return InitialDensity(PiecewiseCdf{std::move(x), std::move(F)});
  }

  static InitialDensity custom(std::function<double(double)> cdf,
                               std::function<double(double)> pdf = {},
                               std::size_t modulus_grid = 100000) {
    if (!cdf) throw std::invalid_argument("custom: cdf is required");
    if (cdf(0.0) != 0.0) throw std::invalid_argument("custom: cdf(0) must be 0");
    double hi = 1.0;
    while (cdf(hi) < 1.0 - 1e-12) {
      hi *= 2.0;
      if (hi > 1e12) {
        throw std::invalid_argument("custom: cdf does not reach 1 (unnormalized)");
      }
    }
    return InitialDensity(CustomCdf{std::move(cdf), std::move(pdf), modulus_grid});
  }

  /// Reads a two-column "x F" table; lines starting with '#' are skipped.
  static InitialDensity from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CDF table: " + path);
    std::vector<double> x, F;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream row(line);
      double xv = 0.0, fv = 0.0;
      if (!(row >> xv >> fv)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected two numeric columns");
      }
      x.push_back(xv);
      F.push_back(fv);
    }
    return piecewise(std::move(x), std::move(F));
  }

  const Family& family() const { return family_; }

  double cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    return std::visit(
        [x](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Uniform01>) {
            return std::min(x, 1.0);
          } else if constexpr (std::is_same_v<T, Exponential>) {
            return -std::expm1(-f.rate * x);
          } else if constexpr (std::is_same_v<T, PiecewiseCdf>) {
            if (x >= f.x.back()) return 1.0;
            const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
            const auto k = static_cast<std::size_t>(it - f.x.begin());
            const double lam = (x - f.x[k - 1]) / (f.x[k] - f.x[k - 1]);
            return f.F[k - 1] + lam * (f.F[k] - f.F[k - 1]);
          } else {
            return std::clamp(f.cdf(x), 0.0, 1.0);
          }
        },
        family_);
  }

  /// 1 - cdf(x), evaluated without cancellation where the family allows it.
  double survival(double x) const {
    if (!(x > 0.0)) return 1.0;
    if (const auto* e = std::get_if<Exponential>(&family_)) {
      return std::exp(-e->rate * x);
    }
    if (std::holds_alternative<Uniform01>(family_)) {
      return x >= 1.0 ? 0.0 : 1.0 - x;
    }
    return 1.0 - cdf(x);
  }

  /// Left-continuous generalized inverse inf{x >= 0 : F0(x) >= p}.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::domain_error("quantile: p must lie in (0, 1)");
    }
    return std::visit(
        [this, p](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Uniform01>) {
            return p;
          } else if constexpr (std::is_same_v<T, Exponential>) {
            return -std::log1p(-p) / f.rate;
          } else if constexpr (std::is_same_v<T, PiecewiseCdf>) {
            const auto it = std::lower_bound(f.F.begin(), f.F.end(), p);
            const auto k = static_cast<std::size_t>(it - f.F.begin());
            if (f.F[k] == p) {
              // Leftmost knot attaining p; earlier knots are strictly below.
              return f.x[k];
            }
            const double lam = (p - f.F[k - 1]) / (f.F[k] - f.F[k - 1]);
            return f.x[k - 1] + lam * (f.x[k] - f.x[k - 1]);
          } else {
            return bisect_quantile(p);
          }
        },
        family_);
  }

  std::optional<double> pdf(double x) const {
    if (x < 0.0) return 0.0;
    if (std::holds_alternative<Uniform01>(family_)) {
      // Right-continuous version, so pdf(0) is the boundary trace f0(0+).
      return x < 1.0 ? 1.0 : 0.0;
    }
    if (const auto* e = std::get_if<Exponential>(&family_)) {
      return e->rate * std::exp(-e->rate * x);
    }
    if (const auto* c = std::get_if<CustomCdf>(&family_); c && c->pdf) {
      return c->pdf(x);
    }
    return std::nullopt;
  }

  bool has_pdf() const { return pdf(0.5).has_value(); }

  /// Interior points x > 0 where f0 jumps (finite-difference stencils must
  /// not straddle them).
  std::vector<double> pdf_discontinuities() const {
    if (std::holds_alternative<Uniform01>(family_)) return {1.0};
    if (const auto* p = std::get_if<PiecewiseCdf>(&family_)) {
      return {p->x.begin() + 1, p->x.end()};
    }
    return {};
  }

  /// Right end of the support; infinity when unbounded.
  double support_max() const {
    if (std::holds_alternative<Uniform01>(family_)) return 1.0;
    if (const auto* p = std::get_if<PiecewiseCdf>(&family_)) return p->x.back();
    return std::numeric_limits<double>::infinity();
  }

  /// Some x* with 1 - F0(x*) < eps.
  double tail_certificate(double eps) const {
    if (!(eps > 0.0 && eps < 1.0)) {
      throw std::domain_error("tail_certificate: eps must lie in (0, 1)");
    }
    return quantile(1.0 - 0.5 * eps);
  }

  /// omega(h; F0) = sup_x F0(x + h) - F0(x).
  double continuity_modulus(double h) const {
    if (!(h > 0.0)) return 0.0;
    return std::visit(
        [this, h](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Uniform01>) {
            return std::min(h, 1.0);
          } else if constexpr (std::is_same_v<T, Exponential>) {
            // Decreasing density: the heaviest window starts at 0.
            return -std::expm1(-f.rate * h);
          } else if constexpr (std::is_same_v<T, PiecewiseCdf>) {
            // F(x+h) - F(x) is piecewise linear in x with kinks where x or
            // x+h meets a knot, so the sup sits at one of those x.
            double best = 0.0;
            for (const double knot : f.x) {
              for (const double x : {knot, knot - h}) {
                if (x < 0.0) continue;
                best = std::max(best, cdf(x + h) - cdf(x));
              }
            }
            return std::min(best, 1.0);
          } else {
            const double top = tail_certificate(1e-6);
            const std::size_t m = std::max<std::size_t>(f.modulus_grid, 2);
            double best = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
              const double x = top * static_cast<double>(i) / static_cast<double>(m - 1);
              best = std::max(best, cdf(x + h) - cdf(x));
            }
            return std::min(best, 1.0);
          }
        },
        family_);
  }

  /// Grid spacing behind continuity_modulus for custom CDFs; 0 when exact.
  double modulus_grid_resolution() const {
    if (const auto* c = std::get_if<CustomCdf>(&family_)) {
      return tail_certificate(1e-6) / static_cast<double>(std::max<std::size_t>(c->modulus_grid, 2) - 1);
    }
    return 0.0;
  }

  std::string describe() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Uniform01>) {
            return "uniform";
          } else if constexpr (std::is_same_v<T, Exponential>) {
            std::ostringstream os;
            os << "exp:" << f.rate;
            return os.str();
          } else if constexpr (std::is_same_v<T, PiecewiseCdf>) {
            return "piecewise";
          } else {
            return "custom";
          }
        },
        family_);
  }

 private:
  explicit InitialDensity(Family f) : family_(std::move(f)) {}

  double bisect_quantile(double p) const {
    double lo = 0.0, hi = 1.0;
    while (cdf(hi) < p) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cdf(mid) >= p) hi = mid; else lo = mid;
    }
    return hi;
  }

  Family family_;
};

/// Parses "uniform", "exp:<rate>" or "file:<path>".
inline InitialDensity parse_density(const std::string& spec) {
  if (spec == "uniform" || spec == "uniform01") return InitialDensity::uniform01();
  if (spec.rfind("exp:", 0) == 0) {
    std::size_t used = 0;
    const std::string tail = spec.substr(4);
    const double rate = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument("bad rate in " + spec);
    return InitialDensity::exponential(rate);
  }
  if (spec.rfind("file:", 0) == 0) return InitialDensity::from_file(spec.substr(5));
  throw std::invalid_argument("unknown density '" + spec +
                              "' (expected uniform | exp:<rate> | file:<path>)");
}

/// Points b_k = F0^{-1}((2k - 1) / (2m)), k = 1..m, for any m >= 1.
inline std::vector<double> quantile_points(std::size_t m, const InitialDensity& density) {
  std::vector<double> out(m);
  const double denom = 2.0 * static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = density.quantile((2.0 * static_cast<double>(k) + 1.0) / denom);
  }
  return out;
}

/// Initial particle configuration a_1 <= ... <= a_n for even n.
inline std::vector<double> quantile_init(std::size_t n, const InitialDensity& density) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("quantile_init: n must be even and >= 2");
  }
  return quantile_points(n, density);
}

}  // namespace rdthin
