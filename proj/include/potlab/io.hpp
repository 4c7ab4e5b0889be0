#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "potlab/dynamics.hpp"
#include "potlab/game.hpp"

namespace potlab {

using json = nlohmann::json;

/// {"players": N, "actions": [...], "payoffs": [[...], ...]}
inline json game_to_json(const NormalFormGame& g) {
  json j;
  j["players"] = g.num_players();
  j["actions"] = g.shape().action_counts();
  j["payoffs"] = g.all_payoffs();
  return j;
}

inline NormalFormGame game_from_json(const json& j) {
  if (!j.is_object() || !j.contains("players") || !j.contains("actions") || !j.contains("payoffs")) {
    throw std::invalid_argument("game JSON needs 'players', 'actions' and 'payoffs'");
  }
  const auto players = j.at("players").get<std::size_t>();
  auto actions = j.at("actions").get<std::vector<std::size_t>>();
  if (actions.size() != players) throw std::invalid_argument("game JSON: 'actions' length differs from 'players'");
  auto payoffs = j.at("payoffs").get<std::vector<std::vector<double>>>();
  return NormalFormGame(GameShape(std::move(actions)), std::move(payoffs));
}

/// Shortest representation that round-trips (at most 17 significant digits).
inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

/// Fixed 17 significant digits, as used in CSV output.
inline std::string format_csv_double(double x) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline std::string format_optional(const std::optional<double>& x) {
  return x ? format_csv_double(*x) : std::string("null");
}

inline std::string dump_game(const NormalFormGame& g) {
  // nlohmann serializes doubles with round-trip precision
  return game_to_json(g).dump();
}

inline NormalFormGame load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file " + path);
  return game_from_json(json::parse(in));
}

inline json profile_to_json(const MixedProfile& s) { return s.strategies; }

inline json trajectory_summary(const Trajectory& t) {
  json j;
  j["converged"] = t.converged;
  j["iterations_used"] = t.iterations_used;
  j["final_loss"] = t.loss_history.empty() ? json(nullptr) : json(t.loss_history.back());
  j["final_profile"] = profile_to_json(t.final_profile);
  return j;
}

}  // namespace potlab
