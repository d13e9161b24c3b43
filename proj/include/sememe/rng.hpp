#pragma once

// Portable, counter-based random numbers.
//
// Every draw is a pure function of (seed, stream, counter):
//
//   x = seed + 0x9E3779B97F4A7C15 * (stream + 1) + 0xD1B54A32D192ED03 * counter
//   out = splitmix64_mix(splitmix64_mix(x))
//
// where splitmix64_mix is the SplitMix64 finalizer (xor-shift 30/27/31 with
// multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Bounded integers are
// drawn by modulo with rejection of the biased tail; doubles take the top 53
// bits. Nothing here depends on the standard library's distribution
// implementations, so seeded runs reproduce bit-for-bit across platforms.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <iterator>
#include <string_view>
#include <utility>

namespace sememe {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to derive stream ids from names.
constexpr std::uint64_t hash_name(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t x = seed_ + 0x9E3779B97F4A7C15ULL * (stream_ + 1) + 0xD1B54A32D192ED03ULL * counter_++;
    return splitmix64_mix(splitmix64_mix(x));
  }

  // Independent generator for a sub-task; does not advance this one.
  constexpr CounterRng split(std::uint64_t tag) const noexcept {
    return CounterRng(splitmix64_mix(seed_ ^ splitmix64_mix(stream_ + 0x632BE59BD9B4E019ULL)),
                      splitmix64_mix(tag + 0x8CB92BA72F3D8DD7ULL));
  }
  CounterRng split(std::string_view name) const noexcept { return split(hash_name(name)); }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    if ((n & (n - 1)) == 0) return next() & (n - 1);
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n) - 1;
    std::uint64_t v = next();
    while (v > limit) v = next();
    return v % n;
  }

  // Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (one value per call).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates over any random-access container.
  template <typename Container>
  void shuffle(Container& items) noexcept {
    for (std::size_t i = std::size(items); i > 1; --i) {
      const std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace sememe
