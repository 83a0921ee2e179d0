#pragma once

// Counter-based random streams (Philox4x32-10).
//
// A stream is identified by (seed, experiment, replica). Every draw is a pure
// function of that triple and the draw counter, so replicas can run in any
// order or on any thread and still reproduce bit-for-bit.

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace rdthin {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox_round(PhiloxCounter ctr, PhiloxKey key) {
  const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
  const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

/// The raw Philox4x32-10 block function.
constexpr detail::PhiloxCounter philox4x32_10(detail::PhiloxCounter ctr,
                                              detail::PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kPhiloxW0;
      key[1] += detail::kPhiloxW1;
    }
    ctr = detail::philox_round(ctr, key);
  }
  return ctr;
}

/// Identifies one independent stream. `experiment` separates experiment kinds
/// that share a base seed; `replica` indexes replicas within an experiment.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t experiment = 0;
  std::uint64_t replica = 0;
};

/// Deterministic random stream; satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kMaxReplica = (std::uint64_t{1} << 40) - 1;

  explicit RandomStream(StreamId id) : id_(id) {
    if (id.replica > kMaxReplica) {
      throw std::out_of_range("RandomStream: replica index exceeds 2^40-1");
    }
    if (id.experiment > 0xFFFFFFu) {
      throw std::out_of_range("RandomStream: experiment id exceeds 2^24-1");
    }
    key_ = {static_cast<std::uint32_t>(id.seed),
            static_cast<std::uint32_t>(id.seed >> 32)};
    const std::uint64_t stream =
        (std::uint64_t{id.experiment} << 40) | id.replica;
    ctr_ = {0u, 0u, static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32)};
  }

  RandomStream(std::uint64_t seed, std::uint32_t experiment,
               std::uint64_t replica)
      : RandomStream(StreamId{seed, experiment, replica}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (lane_ == 2) refill();
    const std::uint64_t out = (std::uint64_t{block_[2 * lane_ + 1]} << 32) |
                              block_[2 * lane_];
    ++lane_;
    return out;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection,
  /// so the result is exactly uniform.
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound is 0");
    __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<__uint128_t>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Child stream for nested replica structure; children of distinct
  /// replicas never collide because the child index lives in the seed.
  RandomStream substream(std::uint32_t child) const {
    StreamId next = id_;
    next.seed = splitmix(id_.seed ^ (std::uint64_t{child} + 1) *
                                         0x9E3779B97F4A7C15ull);
    return RandomStream(next);
  }

  const StreamId& id() const { return id_; }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  void refill() {
    block_ = philox4x32_10(ctr_, key_);
    if (++ctr_[0] == 0) {
      if (++ctr_[1] == 0) throw std::overflow_error("RandomStream exhausted");
    }
    lane_ = 0;
  }

  StreamId id_;
  detail::PhiloxKey key_{};
  detail::PhiloxCounter ctr_{};
  detail::PhiloxCounter block_{};
  int lane_ = 2;
};

}  // namespace rdthin
