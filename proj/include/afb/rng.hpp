// Deterministic pseudorandom primitives. Everything that shuffles, samples or
// initializes weights goes through SplitMix64 so results are identical across
// platforms and standard-library versions (std::shuffle and the std
// distributions are implementation-defined and must not be used here).
#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace afb {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

/// Derives a child seed from (parent, index). Used for per-word, per-epoch
/// and per-trial streams so that parallel execution order cannot change them.
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index) {
  SplitMix64 g(parent + 0x9e3779b97f4a7c15ULL * (index + 1));
  g.next();
  return g.next();
}

/// FNV-1a over bytes; stable digest for strings used in seeds and cache keys.
inline std::uint64_t fnv1a(std::string_view s,
                           std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(std::uint64_t v, std::uint64_t h = 14695981039346656037ULL) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

}  // namespace afb
