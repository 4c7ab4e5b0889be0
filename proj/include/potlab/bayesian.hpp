#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "potlab/econ.hpp"
#include "potlab/game.hpp"
#include "potlab/hodge.hpp"
#include "potlab/operator_cache.hpp"

namespace potlab {

/// Non-decreasing map from type index to action index.
struct MonotoneStrategy {
  std::vector<std::size_t> map;

  friend auto operator<=>(const MonotoneStrategy&, const MonotoneStrategy&) = default;
};

/// Finite Bayesian auction/contest with independent priors over ordered type
/// grids. The type doubles as the player's valuation.
struct BayesianGame {
  EconKind kind = EconKind::all_pay;
  std::vector<std::vector<double>> types;
  std::vector<std::vector<double>> prior;
  std::vector<std::vector<double>> action_grid;

  std::size_t num_players() const { return types.size(); }

  void validate() const {
    const std::size_t n = types.size();
    if (n < 2) throw std::invalid_argument("BayesianGame: at least two players required");
    if (prior.size() != n || action_grid.size() != n) throw std::invalid_argument("BayesianGame: per-player data missing");
    for (std::size_t i = 0; i < n; ++i) {
      if (types[i].empty() || prior[i].size() != types[i].size()) {
        throw std::invalid_argument("BayesianGame: type grid and prior must be non-empty and aligned");
      }
      double total = 0.0;
      for (std::size_t k = 0; k < types[i].size(); ++k) {
        if (k && !(types[i][k] > types[i][k - 1])) throw std::invalid_argument("BayesianGame: types must increase");
        if (!(prior[i][k] >= 0.0)) throw std::invalid_argument("BayesianGame: negative prior weight");
        total += prior[i][k];
      }
      if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("BayesianGame: prior weights must sum to 1");
      if (action_grid[i].empty()) throw std::invalid_argument("BayesianGame: empty action grid");
    }
  }

  /// Types k/V for k = 1..V with uniform weights, the same bid grid for all.
  static BayesianGame uniform(EconKind kind, std::size_t players, std::size_t num_types, std::vector<double> grid) {
    if (num_types == 0) throw std::invalid_argument("BayesianGame: at least one type required");
    BayesianGame b;
    b.kind = kind;
    for (std::size_t i = 0; i < players; ++i) {
      std::vector<double> t(num_types);
      for (std::size_t k = 0; k < num_types; ++k) t[k] = static_cast<double>(k + 1) / static_cast<double>(num_types);
      b.types.push_back(std::move(t));
      b.prior.emplace_back(num_types, 1.0 / static_cast<double>(num_types));
      b.action_grid.push_back(grid);
    }
    return b;
  }
};

/// Default bid grid for the Bayesian sweeps: A points equally spaced on
/// [0, 0.9], i.e. {0.0, 0.3, 0.6, 0.9} for A = 4.
inline std::vector<double> bayesian_bid_grid(std::size_t actions) {
  if (actions < 2) throw std::invalid_argument("bid grid needs at least two points");
  std::vector<double> g(actions);
  for (std::size_t k = 0; k < actions; ++k) g[k] = 0.9 * static_cast<double>(k) / static_cast<double>(actions - 1);
  return g;
}

inline constexpr std::size_t kMaxMonotoneStrategies = 1'000'000;

/// C(n, k) or nullopt when it exceeds `cap`.
inline std::optional<std::size_t> binomial(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    // result * (n - k + j) / j stays integral at every step
    const std::size_t factor = n - k + j;
    if (result > std::numeric_limits<std::size_t>::max() / factor) return std::nullopt;
    result = result * factor / j;
    if (result > cap) return std::nullopt;
  }
  return result;
}

/// All non-decreasing maps {0..V-1} -> {0..A-1} in lexicographic order.
inline std::vector<MonotoneStrategy> enumerate_monotone_strategies(std::size_t num_types, std::size_t num_actions) {
  if (num_types == 0 || num_actions == 0) throw std::invalid_argument("enumerate_monotone_strategies: V, A >= 1");
  const auto count = binomial(num_types + num_actions - 1, num_actions - 1, kMaxMonotoneStrategies);
  if (!count) throw std::length_error("enumerate_monotone_strategies: too many strategies");
  std::vector<MonotoneStrategy> out;
  out.reserve(*count);
  std::vector<std::size_t> cur(num_types, 0);
  while (true) {
    out.push_back({cur});
    // increment the rightmost position that can grow, reset the tail to it
    std::size_t pos = num_types;
    while (pos > 0 && cur[pos - 1] == num_actions - 1) --pos;
    if (pos == 0) break;
    const std::size_t v = cur[pos - 1] + 1;
    for (std::size_t k = pos - 1; k < num_types; ++k) cur[k] = v;
  }
  return out;
}

namespace detail {
// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};
}  // namespace detail

/// Ex-ante normal form over monotone strategies, in enumeration order.
inline NormalFormGame induced_normal_form(const BayesianGame& b, const ShapeLimits& limits = {}) {
  b.validate();
  const std::size_t n = b.num_players();
  std::vector<std::vector<MonotoneStrategy>> strategies(n);
  std::vector<std::size_t> counts(n);
  for (std::size_t i = 0; i < n; ++i) {
    strategies[i] = enumerate_monotone_strategies(b.types[i].size(), b.action_grid[i].size());
    counts[i] = strategies[i].size();
  }
  GameShape shape(counts);
  limits.check(shape);

  // type profiles in mixed radix, player 0 most significant
  std::size_t num_type_profiles = 1;
  for (const auto& t : b.types) num_type_profiles *= t.size();

  std::vector<std::vector<double>> u(n, std::vector<double>(shape.total_profiles()));
  std::vector<std::size_t> type_idx(n);
  std::vector<double> bids(n);
  for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
    std::vector<detail::CompensatedSum> acc(n);
    std::fill(type_idx.begin(), type_idx.end(), 0);
    for (std::size_t tp = 0; tp < num_type_profiles; ++tp) {
      double weight = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        weight *= b.prior[i][type_idx[i]];
        bids[i] = b.action_grid[i][strategies[i][shape.action_of(p, i)].map[type_idx[i]]];
      }
      for (std::size_t i = 0; i < n; ++i) {
        acc[i].add(weight * ex_post_utility(b.kind, bids, i, b.types[i][type_idx[i]]));
      }
      for (std::size_t i = n; i-- > 0;) {
        if (++type_idx[i] < b.types[i].size()) break;
        type_idx[i] = 0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) u[i][p] = acc[i].value();
  }
  return NormalFormGame(std::move(shape), std::move(u));
}

struct BayesianSweepRow {
  std::size_t num_types = 0;
  std::size_t num_strategies = 0;
  double potentialness = 0.0;
  bool has_pure_bne = false;
};

/// Two-player sweep over type counts with the default bid grid for A actions.
inline std::vector<BayesianSweepRow> bayesian_potentialness_sweep(EconKind kind, std::size_t actions,
                                                                  const std::vector<std::size_t>& type_counts,
                                                                  OperatorCache& cache) {
  std::vector<BayesianSweepRow> rows;
  for (std::size_t v : type_counts) {
    const BayesianGame b = BayesianGame::uniform(kind, 2, v, bayesian_bid_grid(actions));
    const NormalFormGame g = induced_normal_form(b, cache.limits());
    const auto ops = cache.get(g.shape());
    const auto p = potentialness(*ops, g);
    if (!p) throw std::runtime_error("bayesian sweep: induced game is non-strategic");
    rows.push_back({v, g.shape().actions(0), *p, pure_equilibria(g).has_pure()});
  }
  return rows;
}

}  // namespace potlab
