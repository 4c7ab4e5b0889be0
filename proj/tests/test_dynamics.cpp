#include <gtest/gtest.h>

#include <cmath>

#include "potlab/dynamics.hpp"
#include "potlab/random.hpp"

using namespace potlab;

TEST(Prox, ZeroStepIsIdentity) {
  const std::vector<double> x = {0.2, 0.3, 0.5};
  const auto z = prox_map(x, {0.0, 0.0, 0.0});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(z[k], x[k], 1e-15);
}

TEST(Prox, HandEvaluatedExample) {
  const auto z = prox_map({0.5, 0.5}, {std::log(2.0), 0.0});
  EXPECT_NEAR(z[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(z[1], 1.0 / 3.0, 1e-15);
}

TEST(Prox, ShiftInvariance) {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(4), y(4), y2(4);
    double s = 0;
    for (double& v : x) s += (v = uniform01(rng) + 0.01);
    for (double& v : x) v /= s;
    const double c = uniform01(rng) * 50 - 25;
    for (std::size_t k = 0; k < 4; ++k) {
      y[k] = uniform01(rng) * 6 - 3;
      y2[k] = y[k] + c;
    }
    const auto a = prox_map(x, y), b = prox_map(x, y2);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
  }
  const auto u = prox_map({0.25, 0.25, 0.25, 0.25}, {3.0, 3.0, 3.0, 3.0});
  for (double v : u) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(Prox, HugeStepsStayFiniteAndPositive) {
  const auto z = prox_map({0.5, 0.5}, {1e6, -1e6});
  EXPECT_GT(z[1], 0.0);
  EXPECT_NEAR(z[0] + z[1], 1.0, 1e-15);
  EXPECT_THROW(prox_map({0.5, 0.5}, {INFINITY, 0.0}), std::invalid_argument);
  EXPECT_THROW(prox_map({1.0, 0.0}, {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(prox_map({1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST(StepSize, ScheduleIsExact) {
  const OMDConfig c{8.0, 0.05, 10, 1e-8};
  EXPECT_EQ(c.step(1), 8.0);
  EXPECT_EQ(c.step(7), 8.0 * std::pow(7.0, -0.05));
  EXPECT_THROW((OMDConfig{0.0, 0.05, 10, 1e-8}.validate()), std::invalid_argument);
  EXPECT_THROW((OMDConfig{1.0, 1.5, 10, 1e-8}.validate()), std::invalid_argument);
  EXPECT_THROW((OMDConfig{1.0, 0.5, 0, 1e-8}.validate()), std::invalid_argument);
}

TEST(Inits, UniformAndRandom) {
  const auto u = uniform_init(GameShape({2, 3}));
  EXPECT_EQ(u.strategies[0], (std::vector<double>{0.5, 0.5}));
  for (double v : u.strategies[1]) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  const GameShape shape({3, 4});
  for (std::uint64_t seed = 0; seed < 1000; ++seed) ASSERT_TRUE(is_valid_mixed_profile(shape, random_init(shape, seed)));
  EXPECT_EQ(random_init(shape, 9).strategies, random_init(shape, 9).strategies);
}

TEST(Inits, RandomInitCoordinateMeans) {
  // Dirichlet(1,..,1) coordinates have mean 1/m and variance (m-1)/(m²(m+1)).
  const GameShape shape({3, 5});
  const int n = 10000;
  std::vector<double> sum(5, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto s = random_init(shape, derive_seed(2, 0, k));
    for (std::size_t j = 0; j < 5; ++j) sum[j] += s.strategies[1][j];
  }
  const double sd = std::sqrt(4.0 / (25.0 * 6.0) / n);
  for (double v : sum) EXPECT_NEAR(v / n, 0.2, 3 * sd);
}

TEST(Omd, PrisonersDilemmaConvergesToDefect) {
  const auto t = run_omd(prisoners_dilemma(), uniform_init(GameShape({2, 2})), random_game_omd());
  ASSERT_TRUE(t.converged);
  EXPECT_LT(t.final_loss(), 1e-8);
  EXPECT_EQ(t.loss_history.size(), t.iterations_used);
  EXPECT_NEAR(t.final_profile.strategies[0][1], 1.0, 1e-6);
  EXPECT_NEAR(t.final_profile.strategies[1][1], 1.0, 1e-6);
}

TEST(Omd, MatchingPenniesFromGenericStartDoesNotConverge) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = run_omd(matching_pennies(), random_init(GameShape({2, 2}), seed), random_game_omd());
    EXPECT_FALSE(t.converged);
    EXPECT_EQ(t.iterations_used, 2000u);
    EXPECT_GE(t.final_loss(), 1e-8);
  }
}

TEST(Omd, UniformIsAFixedPointOfMatchingPennies) {
  // the uniform profile is the game's mixed equilibrium, so the loss is zero
  const auto t = run_omd(matching_pennies(), uniform_init(GameShape({2, 2})), random_game_omd());
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iterations_used, 1u);
  EXPECT_EQ(t.final_profile.strategies[0], (std::vector<double>{0.5, 0.5}));
}

TEST(Omd, StrictNashVertexConvergesQuickly) {
  const auto bos = battle_of_the_sexes();
  const MixedProfile start = interior(as_mixed(bos.shape(), {{1, 1}}));
  const auto t = run_omd(bos, start, random_game_omd());
  EXPECT_TRUE(t.converged);
  EXPECT_LE(t.iterations_used, 5u);
}

TEST(Omd, LossNonincreasingNearStrictNash) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = sample_random_game(GameShape({2, 2}), seed);
    const auto ne = pure_equilibria(g);
    if (!ne.has_strict()) continue;
    MixedProfile s = as_mixed(g.shape(), ne.strict_pure_ne.front());
    for (auto& x : s.strategies)
      for (double& v : x) v = v == 1.0 ? 1.0 - 1e-9 : 1e-9;
    OMDConfig cfg = random_game_omd();
    cfg.max_iters = 50;
    cfg.tolerance = 1e-300;
    const auto t = run_omd(g, s, cfg);
    for (std::size_t k = 1; k < t.loss_history.size(); ++k) ASSERT_LE(t.loss_history[k], t.loss_history[k - 1] + 1e-15);
  }
}

TEST(Omd, IteratesStayOnTheSimplex) {
  const auto g = sample_random_game(GameShape({3, 4}), 4);
  OMDConfig cfg = random_game_omd();
  for (std::size_t T : {1, 2, 5, 20, 200}) {
    cfg.max_iters = T;
    const auto t = run_omd(g, random_init(g.shape(), 8), cfg);
    ASSERT_TRUE(is_valid_mixed_profile(g.shape(), t.final_profile));
    for (const auto& x : t.final_profile.strategies)
      for (double v : x) ASSERT_GT(v, 0.0);
  }
}

TEST(Omd, BoundaryInitIsPushedInside) {
  const auto t = run_omd(prisoners_dilemma(), MixedProfile{{{1.0, 0.0}, {1.0, 0.0}}}, random_game_omd());
  EXPECT_TRUE(t.converged);
  EXPECT_THROW(run_omd(prisoners_dilemma(), MixedProfile{{{0.7, 0.7}, {1.0, 0.0}}}, random_game_omd()),
               std::invalid_argument);
}

TEST(Omd, Deterministic) {
  const auto g = sample_random_game(GameShape({2, 2, 2}), 12);
  const auto a = run_omd(g, random_init(g.shape(), 1), random_game_omd());
  const auto b = run_omd(g, random_init(g.shape(), 1), random_game_omd());
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.final_profile.strategies, b.final_profile.strategies);
}
