#pragma once

#include <cstdint>

namespace paac {

namespace detail {
// splitmix64 finalizer; the whole engine is built from it so results are
// identical on every platform and standard library.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Stable hash of (seed, index) used to derive independent RNG streams.
/// Depends only on its two arguments, so growing a pool never perturbs the
/// streams of existing members.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::mix64(seed ^ (detail::mix64(index + 1) + 0x9e3779b97f4a7c15ULL));
}

/// Minimal counter-based generator (splitmix64). Each stream is a value
/// type; copies replay the same sequence.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, n), unbiased via rejection. n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace paac
