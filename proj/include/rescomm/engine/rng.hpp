#pragma once

#include <cstdint>

namespace rescomm {

/// Counter-based generator: draw i of seed s is a pure function of (s, i).
///
/// There is no hidden state beyond the counter, so a stream can be resumed
/// from any (seed, counter) pair and results are identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), key_(mix(seed ^ 0x6a09e667f3bcc909ULL)), counter_(counter) {}

  /// Draw at an absolute position without touching the stream counter.
  std::uint64_t at(std::uint64_t index) const noexcept;

  /// Uniform double in [0, 1) at an absolute position (53-bit resolution).
  double uniform_at(std::uint64_t index) const noexcept;

  std::uint64_t next() noexcept { return at(counter_++); }
  double uniform() noexcept { return uniform_at(counter_++); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

inline CounterRng seeded_rng(std::uint64_t seed) { return CounterRng(seed); }

}  // namespace rescomm
