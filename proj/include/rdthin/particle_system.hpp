#pragma once

// Event-driven simulation of the removal-driven thinning particle system.
//
// n particles drift left at unit speed. When the leftmost one reaches 0 it is
// removed together with one other survivor chosen uniformly at random.
// Positions are never moved: particle i sits at a_i - t, so the k-th event
// time is the initial position of the k-th hitter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rdthin/format.hpp"
#include "rdthin/kinetic.hpp"
#include "rdthin/measure.hpp"
#include "rdthin/random.hpp"
#include "rdthin/rank_set.hpp"

namespace rdthin {

struct Trajectory {
  std::vector<double> initial_positions;
  std::vector<double> hit_times;
  std::vector<std::uint32_t> hit_index;
  std::vector<std::uint32_t> companion_index;

  std::size_t n() const { return initial_positions.size(); }
  std::size_t events() const { return hit_times.size(); }
};

inline void validate_positions(const std::vector<double>& positions) {
  if (positions.size() < 2 || positions.size() % 2 != 0) {
    throw std::invalid_argument("simulate: particle count must be even and >= 2");
  }
  if (positions.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("simulate: too many particles");
  }
  if (!(positions.front() > 0.0)) {
    throw std::invalid_argument("simulate: positions must be strictly positive");
  }
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] > positions[i - 1])) {
      throw std::invalid_argument("simulate: positions must be strictly increasing (no ties)");
    }
  }
}

inline Trajectory simulate(std::vector<double> positions, RandomStream& rng) {
  validate_positions(positions);
  const std::size_t n = positions.size();
  Trajectory traj;
  traj.hit_times.reserve(n / 2);
  traj.hit_index.reserve(n / 2);
  traj.companion_index.reserve(n / 2);

  RankSet alive(n);
  std::size_t leftmost = 0;
  while (alive.size() > 0) {
    while (!alive.contains(leftmost)) ++leftmost;
    const std::size_t m = alive.size();
    // The hitter has rank 0 among survivors; companions have ranks 1..m-1.
    const std::size_t companion = alive.select(1 + rng.uniform_index(m - 1));
    alive.erase(leftmost);
    alive.erase(companion);
    traj.hit_times.push_back(positions[leftmost]);
    traj.hit_index.push_back(static_cast<std::uint32_t>(leftmost));
    traj.companion_index.push_back(static_cast<std::uint32_t>(companion));
  }
  traj.initial_positions = std::move(positions);
  return traj;
}

/// Time at which each particle leaves the system.
inline std::vector<double> removal_times(const Trajectory& traj) {
  std::vector<double> out(traj.n(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < traj.events(); ++k) {
    out[traj.hit_index[k]] = traj.hit_times[k];
    out[traj.companion_index[k]] = traj.hit_times[k];
  }
  return out;
}

/// L^n(t) = (1/n) #{k : tau_k <= t}.
class LossPath {
 public:
  LossPath(std::vector<double> hit_times, std::size_t n)
      : hit_times_(std::move(hit_times)), n_(n) {}

  explicit LossPath(const Trajectory& traj) : LossPath(traj.hit_times, traj.n()) {}

  double operator()(double t) const {
    const auto k = std::upper_bound(hit_times_.begin(), hit_times_.end(), t) - hit_times_.begin();
    return static_cast<double>(k) / static_cast<double>(n_);
  }

  /// L^n(t-).
  double left_limit(double t) const {
    const auto k = std::lower_bound(hit_times_.begin(), hit_times_.end(), t) - hit_times_.begin();
    return static_cast<double>(k) / static_cast<double>(n_);
  }

  double terminal() const {
    return static_cast<double>(hit_times_.size()) / static_cast<double>(n_);
  }

  const std::vector<double>& hit_times() const { return hit_times_; }
  std::size_t n() const { return n_; }

 private:
  std::vector<double> hit_times_;
  std::size_t n_;
};

inline LossPath loss_path(const Trajectory& traj) { return LossPath(traj); }

/// sup over t in [0, inf) of |L^n(t) - L(t)|. L is continuous and
/// nondecreasing while L^n is a right-continuous step function, so on each
/// inter-jump interval the extreme deviation is at one of its endpoints.
inline double sup_loss_deviation(const LossPath& path, const KineticSolution& limit) {
  double sup = 0.0;
  const double n = static_cast<double>(path.n());
  const auto& taus = path.hit_times();
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double lim = limit.loss(taus[k]);
    const double before = static_cast<double>(k) / n;
    const double at = static_cast<double>(k + 1) / n;
    sup = std::max({sup, std::abs(before - lim), std::abs(at - lim)});
  }
  // t -> inf: both sides saturate, L^n at terminal() and L at 1/2.
  sup = std::max(sup, std::abs(path.terminal() - 0.5));
  return sup;
}

/// mu^n(t): survivors at positions a_i - t, weight 1/n each.
inline DiscreteMeasure snapshot_empirical(const Trajectory& traj,
                                          const std::vector<double>& removal,
                                          double t) {
  const double w = 1.0 / static_cast<double>(traj.n());
  std::vector<double> atoms;
  for (std::size_t i = 0; i < traj.n(); ++i) {
    if (removal[i] > t) atoms.push_back(traj.initial_positions[i] - t);
  }
  return DiscreteMeasure::uniform(std::move(atoms), w);
}

inline DiscreteMeasure snapshot_empirical(const Trajectory& traj, double t) {
  return snapshot_empirical(traj, removal_times(traj), t);
}

/// CSV: event_index,tau,hit_index,companion_index (indices 0-based).
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "event_index,tau,hit_index,companion_index\n";
  for (std::size_t k = 0; k < traj.events(); ++k) {
    os << k << ',' << format_double(traj.hit_times[k]) << ',' << traj.hit_index[k] << ','
       << traj.companion_index[k] << '\n';
  }
}

}  // namespace rdthin
