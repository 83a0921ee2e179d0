#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rdthin {

/// Subset of {0, ..., n-1} supporting erase, rank and select in O(log n).
/// Backed by a Fenwick tree of 0/1 counts; starts full.
class RankSet {
 public:
  explicit RankSet(std::size_t n) : n_(n), tree_(n + 1, 0), present_(n, 1), count_(n) {
    for (std::size_t i = 1; i <= n; ++i) {
      tree_[i] += 1;
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n) tree_[parent] += tree_[i];
    }
    top_ = n == 0 ? 0 : std::bit_floor(n);
  }

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return n_; }
  bool contains(std::size_t i) const { return i < n_ && present_[i] != 0; }

  void erase(std::size_t i) {
    if (!contains(i)) throw std::out_of_range("RankSet::erase: index not present");
    present_[i] = 0;
    --count_;
    for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) --tree_[k];
  }

  /// Number of present elements strictly below i.
  std::size_t rank(std::size_t i) const {
    std::size_t s = 0;
    for (std::size_t k = i; k > 0; k -= k & (~k + 1)) s += tree_[k];
    return s;
  }

  /// The present element with exactly k present elements below it.
  std::size_t select(std::size_t k) const {
    if (k >= count_) throw std::out_of_range("RankSet::select: rank out of range");
    std::size_t pos = 0;
    std::size_t remaining = k;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= n_ && tree_[next] <= remaining) {
        pos = next;
        remaining -= tree_[next];
      }
    }
    return pos;  // 1-based position pos+1 == 0-based index pos
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> tree_;
  std::vector<std::uint8_t> present_;
  std::size_t count_;
  std::size_t top_ = 0;
};

}  // namespace rdthin
