#pragma once

#include <cstdint>

namespace xlab {

/// Counter-based generator "xlab-ctr-v1".
///
/// The i-th output of stream s under seed k is mix64(key + (i+1) * 0x9E3779B97F4A7C15) where
/// key = mix64(k ^ mix64(s + 0x632BE59BD9B4E019)) and mix64 is the SplitMix64 finalizer
/// (shifts 30/27/31, multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Doubles take the top
/// 53 bits. Any implementation following this recipe reproduces the same draws for the same seed.
class CounterRng {
 public:
  static constexpr const char* kName = "xlab-ctr-v1";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL))) {}

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL); }
  std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform on {0, ..., n-1}, by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} / n) * n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r < limit) return r % n;
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace xlab
