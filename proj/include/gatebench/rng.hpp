#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace gatebench {

// SplitMix64 finalizer. Bit-exact on every platform, unlike the standard
// library distributions.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over bytes, then mixed.
constexpr std::uint64_t hash_bytes(std::string_view s,
                                   std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

/// Builds a 64-bit key from a seed and a list of string/integer parts.
/// Used as the counter for stateless draws: the same parts always give the
/// same key, regardless of call order or thread.
class StreamKey {
 public:
  explicit constexpr StreamKey(std::uint64_t seed) noexcept : state_(mix64(seed)) {}

  constexpr StreamKey& add(std::string_view part) noexcept {
    // Length prefix keeps ("ab","c") distinct from ("a","bc").
    state_ = mix64(state_ ^ mix64(part.size()));
    state_ = hash_bytes(part, state_);
    return *this;
  }
  constexpr StreamKey& add(std::uint64_t part) noexcept {
    state_ = mix64(state_ ^ mix64(part + 0x5851f42d4c957f2dULL));
    return *this;
  }
  constexpr std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Sequential generator over a counter: draw i is mix64(key + i).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}
  explicit constexpr CounterRng(const StreamKey& key) noexcept : key_(key.value()) {}

  constexpr std::uint64_t next_u64() noexcept {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % bound;
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) noexcept {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gatebench
