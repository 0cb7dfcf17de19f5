#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace patrol {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Named sub-seed: stable across platforms and independent of call order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed ^ fnv1a(name));
  h = splitmix64(h ^ a);
  return splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
}

/// Uniform draw in the half-open interval (lo, hi].
inline double uniform_open_closed(Rng& rng, double lo, double hi) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);  // [0, 1)
  return hi - u * (hi - lo);
}

}  // namespace patrol
