#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace schoolchoice {

using Seed = std::uint64_t;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent child seed for (master, index, stream). Pure function of its
/// arguments, so replication r can be rerun in isolation.
constexpr Seed derive_seed(Seed master, std::uint64_t index,
                           std::uint64_t stream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ index) ^
                    (stream * 0xD1B54A32D192ED03ULL));
}

/// Streams used by the experiment harness.
enum class SeedStream : std::uint64_t {
  kMarket = 1,
  kMechanism = 2,
  kManipulation = 3,
};

/// Seeded generator with platform-independent derived draws. The raw engine
/// is std::mt19937_64, whose output sequence the standard fixes; the bounded
/// and real-valued draws are done here rather than through <random>
/// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  /// Uniform random permutation of 0..n-1.
  template <typename Int = std::int32_t>
  std::vector<Int> permutation(std::size_t n) {
    std::vector<Int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Int>(i);
    shuffle(std::span<Int>(perm));
    return perm;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace schoolchoice
