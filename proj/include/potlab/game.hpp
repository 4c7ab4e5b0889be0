#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace potlab {

/// Number of players and actions per player of a finite game.
///
/// Profiles are laid out in mixed radix with player 0 as the most
/// significant digit, so for a 2x3 game the profile (1, 2) has index 5.
class GameShape {
 public:
  GameShape() = default;

  explicit GameShape(std::vector<std::size_t> actions) : actions_(std::move(actions)) {
    if (actions_.size() < 2) {
      throw std::invalid_argument("GameShape: at least two players are required");
    }
    for (std::size_t m : actions_) {
      if (m < 2) throw std::invalid_argument("GameShape: every player needs at least two actions");
    }
    strides_.assign(actions_.size(), 1);
    std::size_t total = 1;
    for (std::size_t i = actions_.size(); i-- > 0;) {
      strides_[i] = total;
      if (total > std::numeric_limits<std::size_t>::max() / actions_[i]) {
        throw std::overflow_error("GameShape: profile count overflows");
      }
      total *= actions_[i];
    }
    total_profiles_ = total;
    std::size_t deviations = 0;
    for (std::size_t m : actions_) deviations += m - 1;
    // total * deviations is even whenever it matters: each edge is counted twice.
    if (deviations != 0 && total > std::numeric_limits<std::size_t>::max() / deviations) {
      throw std::overflow_error("GameShape: edge count overflows");
    }
    total_edges_ = total * deviations / 2;
  }

  std::size_t num_players() const { return actions_.size(); }
  std::size_t actions(std::size_t player) const { return actions_.at(player); }
  const std::vector<std::size_t>& action_counts() const { return actions_; }
  std::size_t stride(std::size_t player) const { return strides_.at(player); }
  std::size_t total_profiles() const { return total_profiles_; }
  std::size_t total_edges() const { return total_edges_; }

  /// Product of the other players' action counts.
  std::size_t opponent_profiles(std::size_t player) const { return total_profiles_ / actions_.at(player); }

  /// Action of `player` in the profile with the given index.
  std::size_t action_of(std::size_t profile, std::size_t player) const {
    return (profile / strides_[player]) % actions_[player];
  }

  /// Index of the profile obtained by replacing `player`'s action.
  std::size_t with_action(std::size_t profile, std::size_t player, std::size_t action) const {
    return profile - action_of(profile, player) * strides_[player] + action * strides_[player];
  }

  /// "2x3x3" style label.
  std::string label() const {
    std::string out;
    for (std::size_t i = 0; i < actions_.size(); ++i) {
      if (i) out += 'x';
      out += std::to_string(actions_[i]);
    }
    return out;
  }

  /// Inverse of label().
  static GameShape parse(const std::string& text) {
    std::vector<std::size_t> actions;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('x', pos), text.size());
      const std::string part = text.substr(pos, end - pos);
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("malformed game shape '" + text + "', expected e.g. 2x3");
      }
      actions.push_back(std::stoull(part));
      pos = end + 1;
    }
    return GameShape(std::move(actions));
  }

  friend bool operator==(const GameShape& a, const GameShape& b) { return a.actions_ == b.actions_; }

 private:
  std::vector<std::size_t> actions_;
  std::vector<std::size_t> strides_;
  std::size_t total_profiles_ = 0;
  std::size_t total_edges_ = 0;
};

struct PureProfile {
  std::vector<std::size_t> actions;

  friend auto operator<=>(const PureProfile&, const PureProfile&) = default;
};

inline void validate_profile(const GameShape& shape, const PureProfile& a) {
  if (a.actions.size() != shape.num_players()) {
    throw std::invalid_argument("profile length does not match the number of players");
  }
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    if (a.actions[i] >= shape.actions(i)) {
      throw std::out_of_range("action index " + std::to_string(a.actions[i]) + " out of range for player " +
                              std::to_string(i));
    }
  }
}

inline std::size_t profile_index(const GameShape& shape, const PureProfile& a) {
  validate_profile(shape, a);
  std::size_t index = 0;
  for (std::size_t i = 0; i < a.actions.size(); ++i) index += a.actions[i] * shape.stride(i);
  return index;
}

inline PureProfile profile_from_index(const GameShape& shape, std::size_t index) {
  if (index >= shape.total_profiles()) throw std::out_of_range("profile index out of range");
  PureProfile a;
  a.actions.resize(shape.num_players());
  for (std::size_t i = 0; i < shape.num_players(); ++i) a.actions[i] = shape.action_of(index, i);
  return a;
}

/// One probability vector per player.
struct MixedProfile {
  std::vector<std::vector<double>> strategies;
};

inline constexpr double kSimplexTolerance = 1e-12;

inline bool is_valid_mixed_profile(const GameShape& shape, const MixedProfile& s,
                                   double tol = kSimplexTolerance) {
  if (s.strategies.size() != shape.num_players()) return false;
  for (std::size_t i = 0; i < s.strategies.size(); ++i) {
    const auto& x = s.strategies[i];
    if (x.size() != shape.actions(i)) return false;
    double sum = 0.0;
    for (double p : x) {
      if (!(p >= 0.0) || !std::isfinite(p)) return false;
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

inline void validate_mixed_profile(const GameShape& shape, const MixedProfile& s) {
  if (!is_valid_mixed_profile(shape, s)) throw std::invalid_argument("invalid mixed profile");
}

/// Pure strategy `a` as a degenerate mixed profile.
inline MixedProfile as_mixed(const GameShape& shape, const PureProfile& a) {
  validate_profile(shape, a);
  MixedProfile s;
  for (std::size_t i = 0; i < shape.num_players(); ++i) {
    std::vector<double> x(shape.actions(i), 0.0);
    x[a.actions[i]] = 1.0;
    s.strategies.push_back(std::move(x));
  }
  return s;
}

/// Finite normal-form game: one flat payoff vector per player, indexed by
/// profile index. Immutable once constructed.
class NormalFormGame {
 public:
  NormalFormGame() = default;

  NormalFormGame(GameShape shape, std::vector<std::vector<double>> payoffs)
      : shape_(std::move(shape)), payoffs_(std::move(payoffs)) {
    if (payoffs_.size() != shape_.num_players()) {
      throw std::invalid_argument("NormalFormGame: expected one payoff vector per player");
    }
    for (const auto& u : payoffs_) {
      if (u.size() != shape_.total_profiles()) {
        throw std::invalid_argument("NormalFormGame: payoff vector length " + std::to_string(u.size()) +
                                    " does not match " + std::to_string(shape_.total_profiles()) + " profiles");
      }
      for (double x : u) {
        if (!std::isfinite(x)) throw std::invalid_argument("NormalFormGame: non-finite payoff");
      }
    }
  }

  const GameShape& shape() const { return shape_; }
  std::size_t num_players() const { return shape_.num_players(); }
  const std::vector<double>& payoffs(std::size_t player) const { return payoffs_.at(player); }
  const std::vector<std::vector<double>>& all_payoffs() const { return payoffs_; }
  double payoff(std::size_t player, std::size_t profile) const { return payoffs_[player][profile]; }
  double payoff(std::size_t player, const PureProfile& a) const {
    return payoffs_.at(player)[profile_index(shape_, a)];
  }

  /// Largest absolute payoff, used to scale tie tolerances.
  double payoff_scale() const {
    double m = 0.0;
    for (const auto& u : payoffs_)
      for (double x : u) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  GameShape shape_;
  std::vector<std::vector<double>> payoffs_;
};

/// Two-player game from row-major payoff matrices.
inline NormalFormGame bimatrix_game(const std::vector<std::vector<double>>& row_payoffs,
                                    const std::vector<std::vector<double>>& col_payoffs) {
  const std::size_t rows = row_payoffs.size();
  const std::size_t cols = rows ? row_payoffs.front().size() : 0;
  if (col_payoffs.size() != rows) throw std::invalid_argument("bimatrix_game: matrix shapes differ");
  std::vector<std::vector<double>> u(2);
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_payoffs[r].size() != cols || col_payoffs[r].size() != cols) {
      throw std::invalid_argument("bimatrix_game: ragged matrix");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      u[0].push_back(row_payoffs[r][c]);
      u[1].push_back(col_payoffs[r][c]);
    }
  }
  return NormalFormGame(GameShape({rows, cols}), std::move(u));
}

// ---------------------------------------------------------------------------
// Pure equilibria

struct EquilibriumReport {
  std::vector<PureProfile> pure_ne;
  std::vector<PureProfile> strict_pure_ne;

  bool has_pure() const { return !pure_ne.empty(); }
  bool has_strict() const { return !strict_pure_ne.empty(); }
};

/// Absolute tolerance for payoff comparisons: 1e-12 relative to the payoff
/// scale (never below 1e-12). Grid-valued economic games produce ties that
/// differ only by rounding.
inline double tie_tolerance(const NormalFormGame& g) { return 1e-12 * std::max(1.0, g.payoff_scale()); }

/// Exhaustive scan. A profile is a pure NE when no unilateral deviation gains
/// more than the tie tolerance; strict when every deviation loses more than it.
inline EquilibriumReport pure_equilibria(const NormalFormGame& g) {
  const GameShape& shape = g.shape();
  const double tol = tie_tolerance(g);
  EquilibriumReport report;
  for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
    bool nash = true;
    bool strict = true;
    for (std::size_t i = 0; i < shape.num_players() && nash; ++i) {
      const double current = g.payoff(i, p);
      const std::size_t own = shape.action_of(p, i);
      for (std::size_t k = 0; k < shape.actions(i); ++k) {
        if (k == own) continue;
        const double gain = g.payoff(i, shape.with_action(p, i, k)) - current;
        if (gain > tol) {
          nash = false;
          break;
        }
        if (gain >= -tol) strict = false;
      }
    }
    if (nash) {
      report.pure_ne.push_back(profile_from_index(shape, p));
      if (strict) report.strict_pure_ne.push_back(report.pure_ne.back());
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Expected payoffs

/// Expected payoff of each of player i's pure actions against the opponents'
/// mixed strategies, summed exactly over all opponent profiles.
inline std::vector<double> payoff_gradient(const NormalFormGame& g, const MixedProfile& s, std::size_t i) {
  const GameShape& shape = g.shape();
  const std::size_t n = shape.num_players();
  std::vector<double> grad(shape.actions(i), 0.0);
  const auto& u = g.payoffs(i);
  std::vector<std::size_t> a(n, 0);
  for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
    double w = 1.0;
    for (std::size_t j = 0; j < n && w != 0.0; ++j) {
      if (j != i) w *= s.strategies[j][a[j]];
    }
    if (w != 0.0) grad[a[i]] += w * u[p];
    for (std::size_t j = n; j-- > 0;) {
      if (++a[j] < shape.actions(j)) break;
      a[j] = 0;
    }
  }
  return grad;
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

/// Lowest-index maximizer.
inline std::size_t best_response(const std::vector<double>& gradient) {
  return static_cast<std::size_t>(std::max_element(gradient.begin(), gradient.end()) - gradient.begin());
}

inline constexpr double kBestResponseFloor = 1e-12;

/// Relative utility loss (b - c)/|b| from a precomputed gradient, where b is
/// the best-response value and c the value of `strategy`. Falls back to the
/// absolute loss b - c when |b| <= 1e-12.
inline double relative_loss_from_gradient(const std::vector<double>& gradient, const std::vector<double>& strategy) {
  const double best = *std::max_element(gradient.begin(), gradient.end());
  const double current = dot(gradient, strategy);
  if (std::abs(best) > kBestResponseFloor) return (best - current) / std::abs(best);
  return best - current;
}

inline double relative_utility_loss(const NormalFormGame& g, const MixedProfile& s, std::size_t i) {
  return relative_loss_from_gradient(payoff_gradient(g, s, i), s.strategies.at(i));
}

// ---------------------------------------------------------------------------
// Standard games

inline NormalFormGame matching_pennies() {
  return bimatrix_game({{1, -1}, {-1, 1}}, {{-1, 1}, {1, -1}});
}

/// Action 0 = cooperate, 1 = defect.
inline NormalFormGame prisoners_dilemma() {
  return bimatrix_game({{-1, -3}, {0, -2}}, {{-1, 0}, {-3, -2}});
}

inline NormalFormGame battle_of_the_sexes() {
  return bimatrix_game({{2, 0}, {0, 1}}, {{1, 0}, {0, 2}});
}

/// Cyclic 3x3 game: the row player wants to match, the column player wants
/// to play one step ahead.
inline NormalFormGame shapley_game() {
  return bimatrix_game({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
}

/// Jordan's 2x2 matching-pennies family: the row player gains alpha or
/// 1 - alpha by matching, the column player gains beta or 1 - beta by
/// mismatching. Only mixed equilibria for alpha, beta in (0, 1).
inline NormalFormGame jordan_game(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
    throw std::invalid_argument("jordan_game: parameters must lie in [0, 1]");
  }
  return bimatrix_game({{alpha, 0}, {0, 1 - alpha}}, {{0, beta}, {1 - beta, 0}});
}

}  // namespace potlab
