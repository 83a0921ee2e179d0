#pragma once

// Closed-form solution of the transport equation with boundary-coupled
// removal,
//
//   d_t f - d_x f = -(f(0,t) / M(t)) f,   f(x,0) = f0(x),
//
// namely f(x,t) = rho(t) f0(x+t) with rho(t) = 1 - F0(t), M = rho^2 and the
// limiting loss L = (1 - rho^2) / 2.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "rdthin/initial_data.hpp"

namespace rdthin {

/// Grid and step for the finite-difference residual check.
struct ResidualConfig {
  double step = 1e-4;
  std::size_t grid = 100;
  double x_max = 0.9;
  double t_max = 0.9;
};

struct ResidualReport {
  double sup_residual = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // stencils straddling a jump of f0
};

class KineticSolution {
 public:
  explicit KineticSolution(InitialDensity density) : density_(std::move(density)) {}

  const InitialDensity& density() const { return density_; }

  double rho(double t) const { return density_.survival(t); }

  double mass(double t) const {
    const double r = rho(t);
    return r * r;
  }

  double loss(double t) const { return 0.5 * (1.0 - mass(t)); }

  /// F(x,t) = rho(t) (F0(x+t) - F0(t)).
  double distribution(double x, double t) const {
    if (!(x > 0.0)) return 0.0;
    const double r = rho(t);
    return r * std::max(0.0, r - density_.survival(x + t));
  }

  double density_value(double x, double t) const {
    const auto f0 = density_.pdf(x + t);
    if (!f0) throw std::logic_error("density_value: initial density has no pdf");
    return rho(t) * *f0;
  }

  /// sup over a grid of |d_t f - d_x f + f(0,t) f / M| with central
  /// differences (second-order one-sided at x = 0).
  ResidualReport pde_residual(const ResidualConfig& cfg = {}) const {
    if (!density_.has_pdf()) {
      throw std::logic_error("pde_residual: initial density has no pdf");
    }
    const double d = cfg.step;
    const auto jumps = density_.pdf_discontinuities();
    auto near_jump = [&](double s) {
      return std::any_of(jumps.begin(), jumps.end(),
                         [&](double j) { return std::abs(s - j) <= 2.5 * d; });
    };
    ResidualReport rep;
    const std::size_t m = std::max<std::size_t>(cfg.grid, 2);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = cfg.t_max * static_cast<double>(i) / static_cast<double>(m - 1);
      for (std::size_t j = 0; j < m; ++j) {
        const double x = cfg.x_max * static_cast<double>(j) / static_cast<double>(m - 1);
        // f depends on x + t through f0 and on t through rho; both stencils
        // must stay on one side of every jump of f0.
        if (near_jump(x + t) || near_jump(t) || mass(t + d) <= 0.0) {
          ++rep.skipped;
          continue;
        }
        const double dt = t >= d
            ? (density_value(x, t + d) - density_value(x, t - d)) / (2 * d)
            : (-3 * density_value(x, t) + 4 * density_value(x, t + d) -
               density_value(x, t + 2 * d)) / (2 * d);
        const double dx = x >= d
            ? (density_value(x + d, t) - density_value(x - d, t)) / (2 * d)
            : (-3 * density_value(x, t) + 4 * density_value(x + d, t) -
               density_value(x + 2 * d, t)) / (2 * d);
        const double coupling = density_value(0.0, t) / mass(t) * density_value(x, t);
        rep.sup_residual = std::max(rep.sup_residual, std::abs(dt - dx + coupling));
        ++rep.evaluated;
      }
    }
    return rep;
  }

 private:
  InitialDensity density_;
};

}  // namespace rdthin
