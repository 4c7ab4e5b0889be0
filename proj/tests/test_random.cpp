#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "potlab/game.hpp"
#include "potlab/random.hpp"

using namespace potlab;

TEST(RandomGame, SameSeedSameGame) {
  const GameShape shape({2, 3, 2});
  EXPECT_EQ(sample_random_game(shape, 42).all_payoffs(), sample_random_game(shape, 42).all_payoffs());
  EXPECT_NE(sample_random_game(shape, 42).all_payoffs(), sample_random_game(shape, 43).all_payoffs());
}

TEST(RandomGame, PayoffsInUnitInterval) {
  const auto g = sample_random_game(GameShape({4, 5}), 1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : g.all_payoffs())
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++n;
    }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / static_cast<double>(n), 0.5, 0.2);
}

TEST(RandomGame, SeedStreamsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 3; ++s)
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(99, s, i));
  EXPECT_EQ(seen.size(), 3000u);
  EXPECT_NE(hash_label("2x2"), hash_label("2x3"));
}

TEST(RandomGame, UniformMomentsMatch) {
  Rng rng(3);
  double s = 0.0, s2 = 0.0, e = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = uniform01(rng);
    s += u;
    s2 += u * u;
    e += exponential(rng);
  }
  EXPECT_NEAR(s / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12, 2e-3);
  EXPECT_NEAR(e / n, 1.0, 4 / std::sqrt(static_cast<double>(n)));
}

// 2x2: fraction with a pure NE vs an independent Monte Carlo over best-response
// configurations (a 2x2 game lacks a pure NE exactly when both players'
// best responses flip in a cycle), and vs the closed form 7/8.
TEST(RandomGame, TwoByTwoPureNashFrequencyMatchesOracle) {
  const GameShape shape({2, 2});
  const int n = 10000;
  int hits = 0;
  for (int k = 0; k < n; ++k) hits += pure_equilibria(sample_random_game(shape, derive_seed(5, 0, k))).has_pure();
  const double p = static_cast<double>(hits) / n;

  std::mt19937 other(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int oracle_hits = 0;
  for (int k = 0; k < n; ++k) {
    double a[2][2], b[2][2];
    for (auto& r : a)
      for (double& v : r) v = U(other);
    for (auto& r : b)
      for (double& v : r) v = U(other);
    // row player's best response to each column, column player's to each row
    const int br_row0 = a[1][0] > a[0][0], br_row1 = a[1][1] > a[0][1];
    const int br_col0 = b[0][1] > b[0][0], br_col1 = b[1][1] > b[1][0];
    const bool cycle = br_row0 != br_row1 && br_col0 != br_col1 && br_row0 == br_col1;
    oracle_hits += !cycle;
  }
  const double q = static_cast<double>(oracle_hits) / n;
  const double se = std::sqrt(2 * 0.875 * 0.125 / n);
  EXPECT_NEAR(p, q, 3 * se);
  EXPECT_NEAR(p, 0.875, 3 * std::sqrt(0.875 * 0.125 / n));
}
