#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

namespace seqclf {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based random stream. The value drawn at a given counter depends
/// only on (seed, stream, counter), so any element of a random tensor can be
/// generated independently of the order or thread it is computed on.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(splitmix64(seed ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 1))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return splitmix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound).
  constexpr std::uint64_t below(std::uint64_t counter, std::uint64_t bound) const noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(counter)) * bound) >> 64);
  }

  /// Standard normal via Box-Muller on counters (2c, 2c+1).
  double normal(std::uint64_t counter) const noexcept {
    const double u1 = 1.0 - uniform(2 * counter);  // (0, 1]
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng for code that just wants "the next draw".
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept : rng_(seed, stream) {}

  std::uint64_t below(std::uint64_t bound) noexcept { return rng_.below(counter_++, bound); }
  double uniform() noexcept { return rng_.uniform(counter_++); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by the stream.
template <typename T>
void shuffle(std::vector<T>& items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed,
                                                   std::uint64_t stream = 0) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RngStream rng(seed, stream);
  shuffle(perm, rng);
  return perm;
}

}  // namespace seqclf
