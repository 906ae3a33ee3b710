#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace fpp {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a list of words into a key. Order-sensitive.
constexpr std::uint64_t hash_words(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  for (std::uint64_t w : words) h = mix64(h ^ w);
  return h;
}

/// Maps 64 random bits to a double in [0, 1) with 53 bits of resolution.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based stream: the k-th draw is a pure function of (key, k), so a
/// consumer can jump to any position without state.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t bits_at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter * 0xd1342543de82ef95ULL + 1));
  }
  constexpr double uniform_at(std::uint64_t counter) const noexcept {
    return to_unit(bits_at(counter));
  }

  // UniformRandomBitGenerator interface over an internal counter.
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  constexpr result_type operator()() noexcept { return bits_at(counter_++); }
  constexpr double uniform() noexcept { return to_unit((*this)()); }
  /// Uniform integer in [0, n), n > 0. Uses rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fpp
