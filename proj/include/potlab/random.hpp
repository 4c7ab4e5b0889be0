#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "potlab/game.hpp"

namespace potlab {

/// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over a string, used to turn setting labels into stream ids.
inline constexpr std::uint64_t hash_label(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stream derivation: seed = mix64(mix64(mix64(master) ^ setting) ^ index).
/// Every task draws from its own generator seeded this way, so results do
/// not depend on how tasks are scheduled.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t setting, std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ setting) ^ index);
}

using Rng = std::mt19937_64;

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Standard exponential variate.
inline double exponential(Rng& rng) { return -std::log1p(-uniform01(rng)); }

/// Payoffs iid U[0,1), drawn player by player in profile order.
inline NormalFormGame sample_random_game(const GameShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> u(shape.num_players(), std::vector<double>(shape.total_profiles()));
  for (auto& row : u)
    for (double& x : row) x = uniform01(rng);
  return NormalFormGame(shape, std::move(u));
}

}  // namespace potlab
