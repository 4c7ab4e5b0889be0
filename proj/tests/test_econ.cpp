#include <gtest/gtest.h>

#include "potlab/econ.hpp"
#include "potlab/hodge.hpp"

using namespace potlab;

namespace {
std::vector<double> payoffs_at(EconKind kind, std::vector<double> bids, std::vector<double> values) {
  std::vector<double> out;
  for (std::size_t i = 0; i < bids.size(); ++i) out.push_back(ex_post_utility(kind, bids, i, values[i]));
  return out;
}
}  // namespace

TEST(Allocation, Examples) {
  EXPECT_EQ(allocation(std::vector<double>{0.5, 0.3}), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(allocation(std::vector<double>{0.5, 0.5}), (std::vector<double>{0.5, 0.5}));
  const auto x = allocation(std::vector<double>{0.2, 0.2, 0.2});
  for (double v : x) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  EXPECT_THROW(allocation(std::vector<double>{}), std::invalid_argument);
}

TEST(Allocation, AlwaysSumsToOne) {
  const auto grid = unit_bid_grid(4);
  for (double a : grid)
    for (double b : grid)
      for (double c : grid) {
        const auto x = allocation(std::vector<double>{a, b, c});
        EXPECT_NEAR(x[0] + x[1] + x[2], 1.0, 1e-15);
      }
}

TEST(EconPayoffs, HandComputedExamples) {
  EXPECT_EQ(payoffs_at(EconKind::fpsb, {0.5, 0.3}, {1, 1}), (std::vector<double>{0.5, 0.0}));
  EXPECT_EQ(payoffs_at(EconKind::spsb, {0.6, 0.4}, {1, 1}), (std::vector<double>{0.6, 0.0}));
  EXPECT_EQ(payoffs_at(EconKind::all_pay, {0.5, 0.5}, {1, 1}), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(payoffs_at(EconKind::tullock, {0.0, 0.0}, {1, 1}), (std::vector<double>{0.5, 0.5}));
  const auto woa = payoffs_at(EconKind::war_of_attrition, {0.4, 0.7}, {1, 1});
  EXPECT_DOUBLE_EQ(woa[0], -0.4);
  EXPECT_DOUBLE_EQ(woa[1], 0.6);
}

TEST(EconPayoffs, TiesAndTullockShares) {
  // war of attrition tie: ½(v − a_j) − ½a_i
  const auto woa = payoffs_at(EconKind::war_of_attrition, {0.5, 0.5}, {1, 1});
  EXPECT_DOUBLE_EQ(woa[0], 0.5 * 0.5 - 0.25);
  const auto t = payoffs_at(EconKind::tullock, {0.25, 0.75}, {1, 1});
  EXPECT_DOUBLE_EQ(t[0], 0.25 - 0.25);
  EXPECT_DOUBLE_EQ(t[1], 0.75 - 0.75);
  const auto t3 = payoffs_at(EconKind::tullock, {0.0, 0.0, 0.0}, {0.9, 0.9, 0.9});
  EXPECT_DOUBLE_EQ(t3[2], 0.3);
}

TEST(EconGame, GridAndLayout) {
  EXPECT_EQ(unit_bid_grid(5), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto g = build_econ_game(EconGameSpec::two_player(EconKind::fpsb, 3, 0.75, 1.0));
  // profile (2, 1): bids (1.0, 0.5), player 0 wins and pays 1.0 with value 0.75
  EXPECT_DOUBLE_EQ(g.payoff(0, PureProfile{{2, 1}}), -0.25);
  EXPECT_DOUBLE_EQ(g.payoff(1, PureProfile{{2, 1}}), 0.0);
  EXPECT_THROW(build_econ_game(EconGameSpec{EconKind::fpsb, {1.5, 1.0}, {3, 3}}), std::invalid_argument);
  EXPECT_THROW(build_econ_game(EconGameSpec{EconKind::fpsb, {1.0, 1.0}, {3}}), std::invalid_argument);
}

TEST(EconGame, KindNames) {
  for (EconKind k : kAllEconKinds) EXPECT_EQ(parse_econ_kind(to_string(k)), k);
  EXPECT_THROW(parse_econ_kind("dutch"), std::invalid_argument);
}

TEST(EconGame, FirstAndSecondPriceShareHarmonicFlow) {
  for (std::size_t m : {5, 8, 11}) {
    for (const std::vector<double>& v : {std::vector<double>{1.0, 1.0}, std::vector<double>{0.75, 1.0}}) {
      const GameShape shape({m, m});
      const auto ops = DecompositionOperators::build(shape);
      const auto f = decompose_flows(ops, build_econ_game({EconKind::fpsb, v, {m, m}}));
      const auto s = decompose_flows(ops, build_econ_game({EconKind::spsb, v, {m, m}}));
      EXPECT_LE((f.harmonic_flow.values - s.harmonic_flow.values).norm(), 1e-8 * f.harmonic_flow.values.norm());
    }
  }
}

TEST(EconGame, PaymentRuleBlendKeepsHarmonicFlow) {
  const std::size_t m = 7;
  const auto ops = DecompositionOperators::build(GameShape({m, m}));
  const auto fp = build_econ_game(EconGameSpec::two_player(EconKind::fpsb, m));
  const auto sp = build_econ_game(EconGameSpec::two_player(EconKind::spsb, m));
  const Eigen::VectorXd ref = decompose_flows(ops, fp).harmonic_flow.values;
  for (double lambda : {0.0, 0.3, 0.5, 0.9}) {
    auto u = fp.all_payoffs();
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t p = 0; p < u[i].size(); ++p) u[i][p] = lambda * fp.payoff(i, p) + (1 - lambda) * sp.payoff(i, p);
    const auto h = decompose_flows(ops, NormalFormGame(fp.shape(), u)).harmonic_flow.values;
    EXPECT_LE((h - ref).norm(), 1e-8 * ref.norm());
  }
}

TEST(EconGame, AllPayHasNoPureEquilibriumOnSmallGrids) {
  for (std::size_t m = 5; m <= 12; ++m) {
    EXPECT_FALSE(pure_equilibria(build_econ_game(EconGameSpec::two_player(EconKind::all_pay, m))).has_pure()) << m;
  }
}

TEST(EconGame, SweepRowsAreDeterministic) {
  OperatorCache cache;
  const auto a = discretization_sweep(EconKind::tullock, {1.0, 1.0}, {5, 6}, cache);
  const auto b = discretization_sweep(EconKind::tullock, {1.0, 1.0}, {5, 6}, cache);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].actions, 5u);
  EXPECT_EQ(a[1].potentialness, b[1].potentialness);
  EXPECT_EQ(cache.builds(), 2u);
}
