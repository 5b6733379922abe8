#pragma once

// Counter-based 64-bit generator.
//
// Output i of a stream with key k is splitmix64_mix(k + (i + 1) * 0x9E3779B97F4A7C15),
// where splitmix64_mix is the SplitMix64 finalizer:
//
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   z =  z ^ (z >> 31)
//
// Doubles in [0, 1) take the top 53 bits: (u >> 11) * 2^-53. The stream is
// the same sequence SplitMix64 produces when seeded with k, so any language
// with 64-bit unsigned arithmetic reproduces it bit for bit.

#include <cstdint>
#include <initializer_list>

namespace daa {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Index hash used to derive substreams: splitmix64 output for state `index`.
constexpr std::uint64_t hash_index(std::uint64_t index) noexcept {
  return splitmix64_mix(index + kGoldenGamma);
}

// Order-sensitive combination of several 64-bit words into one seed.
constexpr std::uint64_t hash_combine(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (std::uint64_t w : words) {
    h = splitmix64_mix(h ^ hash_index(w));
  }
  return h;
}

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  // Independent stream for element `index` of the stream family keyed by `seed`.
  static constexpr CounterRng substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return CounterRng(seed ^ hash_index(index));
  }

  constexpr std::uint64_t next_u64() noexcept {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGoldenGamma);
  }

  // Uniform double in [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound); bound > 0. Rejection sampling, no modulo bias.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
    std::uint64_t u = next_u64();
    while (u >= limit) {
      u = next_u64();
    }
    return u % bound;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace daa
