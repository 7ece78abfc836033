#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

// Portable seeded randomness. std::mt19937_64's output sequence is fixed by
// the standard, but the std:: distributions are not, so bounded draws and
// shuffles are done here by hand.
namespace elite::random {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

// Uniform integer in [0, bound) by rejection sampling; bound must be > 0.
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

// Fisher–Yates, high index down.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

template <typename T>
const T& pick(const std::vector<T>& items, std::mt19937_64& rng) {
  return items[static_cast<std::size_t>(below(rng, items.size()))];
}

}  // namespace elite::random
