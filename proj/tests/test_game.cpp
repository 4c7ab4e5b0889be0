#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "potlab/game.hpp"
#include "potlab/random.hpp"

using namespace potlab;

namespace {

// Independent double-loop oracle for bimatrix games, exact comparisons.
struct NaiveNE {
  std::set<std::pair<std::size_t, std::size_t>> pure, strict;
};

NaiveNE naive_bimatrix_ne(const NormalFormGame& g) {
  const std::size_t R = g.shape().actions(0), C = g.shape().actions(1);
  auto u = [&](std::size_t i, std::size_t r, std::size_t c) { return g.payoffs(i)[r * C + c]; };
  NaiveNE out;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      bool ne = true, st = true;
      for (std::size_t r2 = 0; r2 < R; ++r2) {
        if (r2 == r) continue;
        if (u(0, r2, c) > u(0, r, c)) ne = false;
        if (u(0, r2, c) >= u(0, r, c)) st = false;
      }
      for (std::size_t c2 = 0; c2 < C; ++c2) {
        if (c2 == c) continue;
        if (u(1, r, c2) > u(1, r, c)) ne = false;
        if (u(1, r, c2) >= u(1, r, c)) st = false;
      }
      if (ne) out.pure.insert({r, c});
      if (ne && st) out.strict.insert({r, c});
    }
  }
  return out;
}

std::set<std::pair<std::size_t, std::size_t>> as_set(const std::vector<PureProfile>& v) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const auto& p : v) s.insert({p.actions[0], p.actions[1]});
  return s;
}

}  // namespace

TEST(GameShape, RejectsDegenerateShapes) {
  EXPECT_THROW(GameShape({2}), std::invalid_argument);
  EXPECT_THROW(GameShape({2, 1}), std::invalid_argument);
  EXPECT_THROW(GameShape(std::vector<std::size_t>{}), std::invalid_argument);
}

TEST(GameShape, CountsProfilesAndEdges) {
  EXPECT_EQ(GameShape({2, 2}).total_profiles(), 4u);
  EXPECT_EQ(GameShape({2, 2}).total_edges(), 4u);
  EXPECT_EQ(GameShape({3, 3}).total_edges(), 18u);
  EXPECT_EQ(GameShape({2, 2, 2}).total_edges(), 12u);
  EXPECT_EQ(GameShape({3, 12, 5}).total_profiles(), 180u);
}

TEST(GameShape, LabelRoundTrip) {
  EXPECT_EQ(GameShape({2, 10}).label(), "2x10");
  EXPECT_EQ(GameShape::parse("3x4x5"), GameShape({3, 4, 5}));
  EXPECT_THROW(GameShape::parse("2x"), std::invalid_argument);
  EXPECT_THROW(GameShape::parse("2by3"), std::invalid_argument);
}

TEST(ProfileIndex, HandComputedExamples) {
  EXPECT_EQ(profile_index(GameShape({2, 2}), {{0, 0}}), 0u);
  EXPECT_EQ(profile_index(GameShape({2, 2}), {{1, 0}}), 2u);
  EXPECT_EQ(profile_index(GameShape({2, 3}), {{1, 2}}), 5u);
  EXPECT_THROW(profile_index(GameShape({2, 3}), {{2, 0}}), std::out_of_range);
  EXPECT_THROW(profile_index(GameShape({2, 3}), {{0}}), std::invalid_argument);
}

TEST(ProfileIndex, BijectionUpToFourPlayersSevenActions) {
  for (const GameShape& shape : {GameShape({2, 3}), GameShape({3, 2, 4}), GameShape({7, 7, 7, 7})}) {
    for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
      ASSERT_EQ(profile_index(shape, profile_from_index(shape, p)), p);
    }
  }
}

TEST(NormalFormGame, ValidatesPayoffs) {
  EXPECT_THROW(NormalFormGame(GameShape({2, 2}), {{1, 2, 3, 4}}), std::invalid_argument);
  EXPECT_THROW(NormalFormGame(GameShape({2, 2}), {{1, 2, 3}, {1, 2, 3, 4}}), std::invalid_argument);
  EXPECT_THROW(NormalFormGame(GameShape({2, 2}), {{1, 2, 3, std::nan("")}, {1, 2, 3, 4}}), std::invalid_argument);
}

TEST(PureEquilibria, PrisonersDilemma) {
  const auto r = pure_equilibria(prisoners_dilemma());
  ASSERT_EQ(r.pure_ne.size(), 1u);
  ASSERT_EQ(r.strict_pure_ne.size(), 1u);
  EXPECT_EQ(r.pure_ne[0].actions, (std::vector<std::size_t>{1, 1}));
}

TEST(PureEquilibria, MatchingPenniesHasNone) { EXPECT_TRUE(pure_equilibria(matching_pennies()).pure_ne.empty()); }

TEST(PureEquilibria, BattleOfTheSexesHasTwoStrict) {
  const auto r = pure_equilibria(battle_of_the_sexes());
  EXPECT_EQ(r.pure_ne.size(), 2u);
  EXPECT_EQ(r.strict_pure_ne.size(), 2u);
}

TEST(PureEquilibria, WeakEquilibriumIsNotStrict) {
  // (0,0) is a NE where player 1 is indifferent
  const auto g = bimatrix_game({{1, 0}, {1, 0}}, {{1, 0}, {0, 1}});
  const auto r = pure_equilibria(g);
  EXPECT_EQ(as_set(r.pure_ne), (std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  EXPECT_TRUE(r.strict_pure_ne.empty());
}

TEST(PureEquilibria, MatchesNaiveOracleOnRandomGames) {
  for (const GameShape& shape : {GameShape({2, 2}), GameShape({2, 3}), GameShape({3, 2}), GameShape({3, 3})}) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      const auto g = sample_random_game(shape, seed);
      const auto r = pure_equilibria(g);
      const auto o = naive_bimatrix_ne(g);
      ASSERT_EQ(as_set(r.pure_ne), o.pure);
      ASSERT_EQ(as_set(r.strict_pure_ne), o.strict);
    }
  }
}

TEST(PureEquilibria, MatchesNaiveOracleOnIntegerGamesWithTies) {
  Rng rng(7);
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<std::vector<double>> a(3, std::vector<double>(3)), b = a;
    for (auto& row : a)
      for (double& v : row) v = static_cast<double>(rng() % 3);
    for (auto& row : b)
      for (double& v : row) v = static_cast<double>(rng() % 3);
    const auto g = bimatrix_game(a, b);
    const auto r = pure_equilibria(g);
    const auto o = naive_bimatrix_ne(g);
    ASSERT_EQ(as_set(r.pure_ne), o.pure);
    ASSERT_EQ(as_set(r.strict_pure_ne), o.strict);
  }
}

TEST(PayoffGradient, HandComputedExample) {
  const auto g = bimatrix_game({{1, 0}, {0, 0}}, {{0, 0}, {0, 0}});
  const MixedProfile s{{{0.5, 0.5}, {0.25, 0.75}}};
  const auto v = payoff_gradient(g, s, 0);
  EXPECT_DOUBLE_EQ(v[0], 0.25);
  EXPECT_DOUBLE_EQ(v[1], 0.0);
}

TEST(PayoffGradient, PureOpponentSelectsColumn) {
  const auto g = sample_random_game(GameShape({3, 4}), 11);
  for (std::size_t j = 0; j < 4; ++j) {
    const MixedProfile s = as_mixed(g.shape(), {{0, j}});
    const auto v = payoff_gradient(g, s, 0);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(v[k], g.payoff(0, PureProfile{{k, j}}));
  }
}

TEST(PayoffGradient, UniformMatchingPenniesIsZero) {
  const auto g = matching_pennies();
  const MixedProfile s{{{0.5, 0.5}, {0.5, 0.5}}};
  for (std::size_t i = 0; i < 2; ++i)
    for (double v : payoff_gradient(g, s, i)) EXPECT_EQ(v, 0.0);
}

TEST(PayoffGradient, ThreePlayerAgainstBruteForce) {
  const GameShape shape({2, 3, 2});
  const auto g = sample_random_game(shape, 5);
  const MixedProfile s{{{0.3, 0.7}, {0.2, 0.5, 0.3}, {0.6, 0.4}}};
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> expect(shape.actions(i), 0.0);
    for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
      const auto a = profile_from_index(shape, p);
      double w = 1.0;
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i) w *= s.strategies[j][a.actions[j]];
      expect[a.actions[i]] += w * g.payoff(i, p);
    }
    const auto v = payoff_gradient(g, s, i);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], expect[k], 1e-15);
  }
}

TEST(PayoffGradient, ShiftLeavesBestResponseAndEquilibriaUnchanged) {
  const auto g = sample_random_game(GameShape({3, 3}), 3);
  auto u = g.all_payoffs();
  for (double& v : u[0]) v += 4.0;
  const NormalFormGame h(g.shape(), u);
  const MixedProfile s{{{0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}}};
  const auto a = payoff_gradient(g, s, 0), b = payoff_gradient(h, s, 0);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(b[k] - a[k], 4.0, 1e-14);
  EXPECT_EQ(best_response(a), best_response(b));
  EXPECT_EQ(as_set(pure_equilibria(g).pure_ne), as_set(pure_equilibria(h).pure_ne));
}

TEST(RelativeLoss, Examples) {
  // strict NE played exactly
  const auto pd = prisoners_dilemma();
  const MixedProfile dd = as_mixed(pd.shape(), {{1, 1}});
  EXPECT_EQ(relative_utility_loss(pd, dd, 0), 0.0);
  EXPECT_EQ(relative_utility_loss(pd, dd, 1), 0.0);
  // b = 2, c = 1
  EXPECT_DOUBLE_EQ(relative_loss_from_gradient({2.0, 0.0}, {0.5, 0.5}), 0.5);
}

TEST(RelativeLoss, NegativeBestResponseStaysNonnegative) {
  // b = -1, c = -2: one unit below the best response
  EXPECT_DOUBLE_EQ(relative_loss_from_gradient({-1.0, -3.0}, {0.5, 0.5}), 1.0);
  const auto pd = prisoners_dilemma();
  const MixedProfile cc = as_mixed(pd.shape(), {{0, 0}});
  EXPECT_GT(relative_utility_loss(pd, cc, 0), 0.0);
}

TEST(RelativeLoss, ZeroBestResponseFallsBackToAbsolute) {
  // all-pay style: best response is bidding zero for value 0, everything else costs
  const auto g = bimatrix_game({{0.0, 0.0}, {-0.5, -0.5}}, {{0.0, 0.0}, {0.0, 0.0}});
  const MixedProfile s{{{0.25, 0.75}, {0.5, 0.5}}};
  // b = 0, c = 0.75 * (-0.5)
  EXPECT_DOUBLE_EQ(relative_utility_loss(g, s, 0), 0.375);
}
