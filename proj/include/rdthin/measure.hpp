#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rdthin {

/// Finite measure on [0, inf) with finitely many atoms. Atoms are kept
/// sorted and distinct; zero weights are dropped.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size()) {
      throw std::invalid_argument("DiscreteMeasure: atoms/weights size mismatch");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(atoms[i] >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative atom");
      if (!(weights[i] >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative weight");
    }
    if (!std::is_sorted(atoms.begin(), atoms.end())) {
      std::vector<std::size_t> idx(atoms.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::sort(idx.begin(), idx.end(),
                [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
      std::vector<double> a2(atoms.size()), w2(atoms.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        a2[i] = atoms[idx[i]];
        w2[i] = weights[idx[i]];
      }
      atoms.swap(a2);
      weights.swap(w2);
    }
    atoms_.reserve(atoms.size());
    weights_.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (weights[i] == 0.0) continue;
      if (!atoms_.empty() && atoms_.back() == atoms[i]) {
        weights_.back() += weights[i];
      } else {
        atoms_.push_back(atoms[i]);
        weights_.push_back(weights[i]);
      }
    }
  }

  /// Equal-weight measure (1/n per point by default).
  static DiscreteMeasure uniform(std::vector<double> points, double weight) {
    std::vector<double> w(points.size(), weight);
    return DiscreteMeasure(std::move(points), std::move(w));
  }

  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  double mass() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  /// mu([0, x]), the right-continuous distribution function.
  double cdf(double x) const {
    const auto end = std::upper_bound(atoms_.begin(), atoms_.end(), x);
    return std::accumulate(weights_.begin(), weights_.begin() + (end - atoms_.begin()), 0.0);
  }

  DiscreteMeasure scaled(double factor) const {
    if (!(factor >= 0.0)) throw std::invalid_argument("DiscreteMeasure: negative scale");
    DiscreteMeasure out = *this;
    if (factor == 0.0) return DiscreteMeasure{};
    for (double& w : out.weights_) w *= factor;
    return out;
  }

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

}  // namespace rdthin
