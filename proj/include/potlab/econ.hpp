#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "potlab/game.hpp"
#include "potlab/operator_cache.hpp"

namespace potlab {

enum class EconKind { fpsb, spsb, all_pay, war_of_attrition, tullock };

inline constexpr std::array<EconKind, 5> kAllEconKinds = {EconKind::fpsb, EconKind::spsb, EconKind::all_pay,
                                                         EconKind::war_of_attrition, EconKind::tullock};

inline std::string_view to_string(EconKind kind) {
  switch (kind) {
    case EconKind::fpsb: return "fpsb";
    case EconKind::spsb: return "spsb";
    case EconKind::all_pay: return "allpay";
    case EconKind::war_of_attrition: return "woa";
    case EconKind::tullock: return "tullock";
  }
  return "?";
}

inline EconKind parse_econ_kind(std::string_view name) {
  for (EconKind k : kAllEconKinds)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown game kind '" + std::string(name) + "'");
}

/// Allocation with ties split evenly: x_i = 1/n_max for every maximal bid.
inline std::vector<double> allocation(std::span<const double> bids) {
  if (bids.empty()) throw std::invalid_argument("allocation: no bids");
  const double top = *std::max_element(bids.begin(), bids.end());
  const auto winners = static_cast<double>(std::count(bids.begin(), bids.end(), top));
  std::vector<double> x(bids.size(), 0.0);
  for (std::size_t i = 0; i < bids.size(); ++i)
    if (bids[i] == top) x[i] = 1.0 / winners;
  return x;
}

/// Ex-post utility of player i for bid profile `bids` and value `value`
/// (the player's own valuation, or the contest prize for Tullock). Ties
/// enter through the fractional allocation, i.e. in expectation.
inline double ex_post_utility(EconKind kind, std::span<const double> bids, std::size_t i, double value) {
  const std::vector<double> x = allocation(bids);
  double highest_other = 0.0;
  bool any_other = false;
  for (std::size_t j = 0; j < bids.size(); ++j) {
    if (j == i) continue;
    highest_other = any_other ? std::max(highest_other, bids[j]) : bids[j];
    any_other = true;
  }
  const double bid = bids[i];
  switch (kind) {
    case EconKind::fpsb: return x[i] * (value - bid);
    case EconKind::spsb: return x[i] * (value - highest_other);
    case EconKind::all_pay: return x[i] * value - bid;
    case EconKind::war_of_attrition: return x[i] * (value - highest_other) - (1.0 - x[i]) * bid;
    case EconKind::tullock: {
      double total = 0.0;
      for (double b : bids) total += b;
      if (total > 0.0) return value * bid / total - bid;
      return value / static_cast<double>(bids.size());
    }
  }
  throw std::logic_error("unreachable");
}

/// Equidistant grid k/(m-1), k = 0..m-1, on [0, 1].
inline std::vector<double> unit_bid_grid(std::size_t m) {
  if (m < 2) throw std::invalid_argument("bid grid needs at least two points");
  std::vector<double> g(m);
  for (std::size_t k = 0; k < m; ++k) g[k] = static_cast<double>(k) / static_cast<double>(m - 1);
  return g;
}

struct EconGameSpec {
  EconKind kind = EconKind::fpsb;
  /// One value per player. For Tullock each player's prize value.
  std::vector<double> valuations;
  std::vector<std::size_t> actions_per_player;

  std::size_t num_players() const { return valuations.size(); }
  std::vector<double> bid_grid(std::size_t player) const { return unit_bid_grid(actions_per_player.at(player)); }

  void validate() const {
    if (valuations.size() < 2) throw std::invalid_argument("EconGameSpec: at least two players required");
    if (actions_per_player.size() != valuations.size()) {
      throw std::invalid_argument("EconGameSpec: one action count per player required");
    }
    for (double v : valuations)
      if (!(v > 0.0 && v <= 1.0)) throw std::invalid_argument("EconGameSpec: valuations must lie in (0, 1]");
    for (std::size_t m : actions_per_player)
      if (m < 2) throw std::invalid_argument("EconGameSpec: at least two actions per player required");
  }

  /// Two symmetric-grid players.
  static EconGameSpec two_player(EconKind kind, std::size_t actions, double v1 = 1.0, double v2 = 1.0) {
    return EconGameSpec{kind, {v1, v2}, {actions, actions}};
  }
};

inline NormalFormGame build_econ_game(const EconGameSpec& spec) {
  spec.validate();
  GameShape shape(spec.actions_per_player);
  const std::size_t n = shape.num_players();
  std::vector<std::vector<double>> grids(n);
  for (std::size_t i = 0; i < n; ++i) grids[i] = spec.bid_grid(i);
  std::vector<std::vector<double>> u(n, std::vector<double>(shape.total_profiles()));
  std::vector<double> bids(n);
  for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
    for (std::size_t i = 0; i < n; ++i) bids[i] = grids[i][shape.action_of(p, i)];
    for (std::size_t i = 0; i < n; ++i) u[i][p] = ex_post_utility(spec.kind, bids, i, spec.valuations[i]);
  }
  return NormalFormGame(std::move(shape), std::move(u));
}

struct DiscretizationRow {
  std::size_t actions = 0;
  double potentialness = 0.0;
  std::size_t pure_ne = 0;
  std::size_t strict_ne = 0;
};

/// One row per grid size; two players with the given valuations.
inline std::vector<DiscretizationRow> discretization_sweep(EconKind kind, const std::vector<double>& valuations,
                                                           const std::vector<std::size_t>& action_counts,
                                                           OperatorCache& cache) {
  std::vector<DiscretizationRow> rows;
  for (std::size_t m : action_counts) {
    EconGameSpec spec{kind, valuations, std::vector<std::size_t>(valuations.size(), m)};
    const NormalFormGame g = build_econ_game(spec);
    const auto ops = cache.get(g.shape());
    const auto p = potentialness(*ops, g);
    if (!p) throw std::runtime_error("discretization_sweep: game is non-strategic");
    const EquilibriumReport ne = pure_equilibria(g);
    rows.push_back({m, *p, ne.pure_ne.size(), ne.strict_pure_ne.size()});
  }
  return rows;
}

}  // namespace potlab
