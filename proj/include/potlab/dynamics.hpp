#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "potlab/game.hpp"
#include "potlab/random.hpp"

namespace potlab {

/// Step sizes η_t = eta0 · t^(−beta), t = 1..max_iters.
struct OMDConfig {
  double eta0 = 8.0;
  double beta = 1.0 / 20.0;
  std::size_t max_iters = 2000;
  double tolerance = 1e-8;

  double step(std::size_t t) const { return eta0 * std::pow(static_cast<double>(t), -beta); }

  void validate() const {
    if (!(eta0 > 0.0)) throw std::invalid_argument("OMDConfig: eta0 must be positive");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("OMDConfig: beta must lie in (0, 1]");
    if (max_iters == 0) throw std::invalid_argument("OMDConfig: max_iters must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("OMDConfig: tolerance must be positive");
  }
};

/// Settings used for the random-game experiments.
inline OMDConfig random_game_omd() { return OMDConfig{8.0, 1.0 / 20.0, 2000, 1e-8}; }
/// Settings used for the economic alpha sweeps.
inline OMDConfig econ_omd() { return OMDConfig{256.0, 1.0 / 20.0, 2000, 1e-8}; }

struct Trajectory {
  bool converged = false;
  std::size_t iterations_used = 0;
  MixedProfile final_profile;
  /// Max over players of the relative utility loss after each update.
  std::vector<double> loss_history;
  double final_loss() const { return loss_history.empty() ? std::numeric_limits<double>::infinity() : loss_history.back(); }
};

/// Entropic prox step x_j·exp(y_j) / Σ_k x_k·exp(y_k), evaluated in the log
/// domain after subtracting max(y). Entries are floored at DBL_MIN so the
/// iterate stays strictly positive in floating point.
inline std::vector<double> prox_map(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("prox_map: dimension mismatch");
  std::vector<double> z(x.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0)) throw std::invalid_argument("prox_map: x must be strictly positive");
    if (!std::isfinite(y[j])) throw std::invalid_argument("prox_map: non-finite step");
    z[j] = std::log(x[j]) + y[j];
    top = std::max(top, z[j]);
  }
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  bool floored = false;
  for (double& v : z) {
    v /= sum;
    if (v < DBL_MIN) {
      v = DBL_MIN;
      floored = true;
    }
  }
  if (floored) {
    double s = 0.0;
    for (double v : z) s += v;
    for (double& v : z) v /= s;
  }
  return z;
}

inline MixedProfile uniform_init(const GameShape& shape) {
  MixedProfile s;
  for (std::size_t i = 0; i < shape.num_players(); ++i) {
    const auto m = shape.actions(i);
    s.strategies.emplace_back(m, 1.0 / static_cast<double>(m));
  }
  return s;
}

/// Uniform on each simplex (Dirichlet(1, ..., 1)) via normalized exponentials.
inline MixedProfile random_init(const GameShape& shape, std::uint64_t seed) {
  Rng rng(seed);
  MixedProfile s;
  for (std::size_t i = 0; i < shape.num_players(); ++i) {
    std::vector<double> x(shape.actions(i));
    double sum = 0.0;
    for (double& v : x) {
      v = exponential(rng);
      sum += v;
    }
    for (double& v : x) v /= sum;
    s.strategies.push_back(std::move(x));
  }
  return s;
}

/// Raises zero (or tiny) entries to 1e-12 and renormalizes.
inline MixedProfile interior(const MixedProfile& s) {
  MixedProfile out = s;
  for (auto& x : out.strategies) {
    double sum = 0.0;
    for (double& v : x) {
      v = std::max(v, 1e-12);
      sum += v;
    }
    for (double& v : x) v /= sum;
  }
  return out;
}

/// Online mirror descent with entropic regularization and full-information
/// gradients. All players update simultaneously; the loss is measured on the
/// post-update profile and the run stops once it falls below the tolerance.
inline Trajectory run_omd(const NormalFormGame& g, const MixedProfile& init, const OMDConfig& cfg) {
  cfg.validate();
  const GameShape& shape = g.shape();
  validate_mixed_profile(shape, init);
  const std::size_t n = shape.num_players();

  Trajectory traj;
  MixedProfile s = interior(init);
  std::vector<std::vector<double>> grads(n);
  auto refresh = [&](std::size_t t) {
    for (std::size_t i = 0; i < n; ++i) {
      grads[i] = payoff_gradient(g, s, i);
      for (double v : grads[i]) {
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "run_omd: non-finite gradient for player " << i << " at iteration " << t;
          throw std::runtime_error(msg.str());
        }
      }
    }
  };
  refresh(0);
  traj.loss_history.reserve(std::min<std::size_t>(cfg.max_iters, 4096));
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    const double eta = cfg.step(t);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> y(grads[i].size());
      for (std::size_t k = 0; k < y.size(); ++k) y[k] = eta * grads[i][k];
      s.strategies[i] = prox_map(s.strategies[i], y);
    }
    refresh(t);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) loss = std::max(loss, relative_loss_from_gradient(grads[i], s.strategies[i]));
    traj.loss_history.push_back(loss);
    traj.iterations_used = t;
    if (loss < cfg.tolerance) {
      traj.converged = true;
      break;
    }
  }
  traj.final_profile = std::move(s);
  return traj;
}

}  // namespace potlab
