#ifndef RETINT_RANDOM_HPP
#define RETINT_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace retint {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable 64-bit FNV-1a hash, used to key seeds on names.
inline std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent stream seed from a base seed and a key.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t key) {
  return splitmix64(splitmix64(base) ^ key);
}

/// Uniform integer in [0, bound) by rejection; the same on every platform.
inline std::uint64_t uniform_below(Rng &rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - Rng::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

/// Fisher-Yates shuffle driven by `seed`.
template <typename T> void shuffle_in_place(std::span<T> values, std::uint64_t seed) {
  Rng rng(splitmix64(seed));
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

} // namespace retint

#endif // RETINT_RANDOM_HPP
