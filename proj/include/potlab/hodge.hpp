#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "potlab/game.hpp"

namespace potlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Ceiling on the shapes whose operators we are willing to build.
///
/// The dense pseudo-inverse of the graph Laplacian costs 8·A² bytes for A
/// profiles; the defaults admit 3 players x 12 actions and 4 players x 7
/// actions. The edge-space projection matrix is only materialized when its
/// 8·E² bytes fit `projection_budget_bytes`; otherwise it is applied in
/// factored form through the Laplacian pseudo-inverse.
struct ShapeLimits {
  std::size_t max_players = 4;
  std::size_t max_profiles = 2401;
  // per-player action caps for three and four players
  std::size_t max_actions_3p = 12;
  std::size_t max_actions_4p = 7;
  std::size_t projection_budget_bytes = std::size_t{256} << 20;

  void check(const GameShape& shape) const {
    const std::size_t n = shape.num_players();
    std::size_t widest = 0;
    for (std::size_t i = 0; i < n; ++i) widest = std::max(widest, shape.actions(i));
    const bool too_wide = (n == 3 && widest > max_actions_3p) || (n == 4 && widest > max_actions_4p);
    if (n > max_players || shape.total_profiles() > max_profiles || too_wide) {
      throw std::length_error("shape " + shape.label() + " exceeds the supported ceiling (" +
                              std::to_string(max_profiles) + " profiles, 3 players x " +
                              std::to_string(max_actions_3p) + " actions, 4 players x " +
                              std::to_string(max_actions_4p) + " actions)");
    }
  }

  bool materialize_projection(const GameShape& shape) const {
    const double bytes = 8.0 * static_cast<double>(shape.total_edges()) * static_cast<double>(shape.total_edges());
    return bytes <= static_cast<double>(projection_budget_bytes);
  }
};

/// A unilateral deviation: `player` moves from profile `source` to `target`,
/// with the source action index strictly below the target action index.
struct Edge {
  std::size_t player = 0;
  std::size_t source = 0;
  std::size_t target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct ResponseGraph {
  GameShape shape;
  std::vector<Edge> edges;

  std::size_t num_nodes() const { return shape.total_profiles(); }
  std::size_t num_edges() const { return edges.size(); }
};

/// Canonical enumeration: players in order, then opponent profiles in
/// profile-index order, then action pairs (k, l), k < l, lexicographically.
inline ResponseGraph build_response_graph(const GameShape& shape, const ShapeLimits& limits = {}) {
  limits.check(shape);
  ResponseGraph graph{shape, {}};
  graph.edges.reserve(shape.total_edges());
  for (std::size_t i = 0; i < shape.num_players(); ++i) {
    const std::size_t m = shape.actions(i);
    for (std::size_t p = 0; p < shape.total_profiles(); ++p) {
      if (shape.action_of(p, i) != 0) continue;
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = k + 1; l < m; ++l) {
          graph.edges.push_back({i, shape.with_action(p, i, k), shape.with_action(p, i, l)});
        }
      }
    }
  }
  return graph;
}

/// Real value per response-graph edge.
struct Flow {
  Eigen::VectorXd values;
};

/// Real value per profile.
struct PotentialFunction {
  Eigen::VectorXd values;
};

/// Shape-dependent linear maps of the decomposition. Immutable; share via
/// `std::shared_ptr<const DecompositionOperators>`.
class DecompositionOperators {
 public:
  /// Builds all operators for `shape`. The Laplacian pseudo-inverse comes
  /// from a symmetric eigendecomposition with eigenvalues below
  /// 1e-10·λ_max treated as zero.
  static DecompositionOperators build(const GameShape& shape, const ShapeLimits& limits = {}) {
    ResponseGraph graph = build_response_graph(shape, limits);
    SparseMatrix grad = make_gradient_map(graph);
    Eigen::MatrixXd laplacian = Eigen::MatrixXd(SparseMatrix(grad.transpose() * grad));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
    if (eig.info() != Eigen::Success) throw std::runtime_error("Laplacian eigendecomposition failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double cutoff = 1e-10 * lambda.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv(lambda.size());
    std::size_t kernel = 0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      if (std::abs(lambda[k]) <= cutoff) {
        inv[k] = 0.0;
        ++kernel;
      } else {
        inv[k] = 1.0 / lambda[k];
      }
    }
    // The response graph is connected, so only the constants are in the kernel.
    if (kernel != 1) {
      std::ostringstream msg;
      msg << "gradient pseudo-inverse: expected a one-dimensional kernel, found " << kernel
          << " (lambda_min=" << lambda.minCoeff() << ", lambda_max=" << lambda.maxCoeff() << ", cutoff=" << cutoff
          << ")";
      throw std::runtime_error(msg.str());
    }
    Eigen::MatrixXd lpinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    lpinv = 0.5 * (lpinv + lpinv.transpose());

    std::optional<Eigen::MatrixXd> projection;
    if (limits.materialize_projection(shape)) projection = projection_from(graph, lpinv);
    SparseMatrix deviation = make_deviation_map(shape, graph.edges);
    return DecompositionOperators(std::move(graph), std::move(deviation), std::move(grad), std::move(lpinv),
                                  std::move(projection));
  }

  /// Assembles operators from stored parts (see operator_cache.hpp).
  static DecompositionOperators from_parts(const GameShape& shape, SparseMatrix deviation, SparseMatrix gradient,
                                           Eigen::MatrixXd laplacian_pinv, std::optional<Eigen::MatrixXd> projection) {
    // the caller already enforced its own ceiling
    ShapeLimits unbounded;
    unbounded.max_players = shape.num_players();
    unbounded.max_profiles = shape.total_profiles();
    unbounded.max_actions_3p = unbounded.max_actions_4p = shape.total_profiles();
    ResponseGraph graph = build_response_graph(shape, unbounded);
    const auto e = static_cast<Eigen::Index>(graph.num_edges());
    const auto n = static_cast<Eigen::Index>(graph.num_nodes());
    const auto np = static_cast<Eigen::Index>(shape.num_players()) * n;
    if (deviation.rows() != e || deviation.cols() != np || gradient.rows() != e || gradient.cols() != n ||
        laplacian_pinv.rows() != n || laplacian_pinv.cols() != n ||
        (projection && (projection->rows() != e || projection->cols() != e))) {
      throw std::invalid_argument("operator dimensions do not match shape " + shape.label());
    }
    return DecompositionOperators(std::move(graph), std::move(deviation), std::move(gradient),
                                  std::move(laplacian_pinv), std::move(projection));
  }

  const GameShape& shape() const { return graph_.shape; }
  const ResponseGraph& graph() const { return graph_; }
  std::size_t num_edges() const { return graph_.num_edges(); }

  /// D: stacked payoffs (player-major) -> flows.
  const SparseMatrix& deviation_map() const { return deviation_; }
  /// δ₀: potentials -> flows.
  const SparseMatrix& gradient_map() const { return gradient_; }
  /// Pseudo-inverse of δ₀ᵀδ₀.
  const Eigen::MatrixXd& laplacian_pinv() const { return laplacian_pinv_; }
  /// Pseudo-inverse of D (closed form, see make_deviation_pinv).
  const SparseMatrix& deviation_pinv() const { return deviation_pinv_; }

  bool has_projection_matrix() const { return projection_.has_value(); }

  /// Dense Π = δ₀δ₀†. Throws when it was not materialized for this shape.
  const Eigen::MatrixXd& projection() const {
    if (!projection_) throw std::logic_error("projection matrix not materialized for shape " + shape().label());
    return *projection_;
  }

  /// Builds Π regardless of the memory budget.
  Eigen::MatrixXd materialize_projection() const {
    return projection_ ? *projection_ : projection_from(graph_, laplacian_pinv_);
  }

  /// Orthogonal projection of a flow onto the potential flows.
  Eigen::VectorXd project_potential(const Eigen::VectorXd& flow) const {
    if (projection_) return (*projection_) * flow;
    return gradient_ * recover_potential(flow);
  }

  /// Least-norm φ minimizing ‖δ₀φ − flow‖.
  Eigen::VectorXd recover_potential(const Eigen::VectorXd& flow) const {
    Eigen::VectorXd divergence = gradient_.transpose() * flow;
    return laplacian_pinv_ * divergence;
  }

 private:
  DecompositionOperators(ResponseGraph graph, SparseMatrix deviation, SparseMatrix gradient,
                         Eigen::MatrixXd laplacian_pinv, std::optional<Eigen::MatrixXd> projection)
      : graph_(std::move(graph)),
        deviation_(std::move(deviation)),
        gradient_(std::move(gradient)),
        laplacian_pinv_(std::move(laplacian_pinv)),
        projection_(std::move(projection)),
        deviation_pinv_(make_deviation_pinv(graph_)) {}

  static SparseMatrix make_gradient_map(const ResponseGraph& graph) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * graph.num_edges());
    for (std::size_t e = 0; e < graph.num_edges(); ++e) {
      const Edge& edge = graph.edges[e];
      t.emplace_back(static_cast<int>(e), static_cast<int>(edge.target), 1.0);
      t.emplace_back(static_cast<int>(e), static_cast<int>(edge.source), -1.0);
    }
    SparseMatrix m(static_cast<Eigen::Index>(graph.num_edges()), static_cast<Eigen::Index>(graph.num_nodes()));
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  static SparseMatrix make_deviation_map(const GameShape& shape, const std::vector<Edge>& edges) {
    const std::size_t n = shape.total_profiles();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const Edge& edge = edges[e];
      t.emplace_back(static_cast<int>(e), static_cast<int>(edge.player * n + edge.target), 1.0);
      t.emplace_back(static_cast<int>(e), static_cast<int>(edge.player * n + edge.source), -1.0);
    }
    SparseMatrix m(static_cast<Eigen::Index>(edges.size()), static_cast<Eigen::Index>(shape.num_players() * n));
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  // D is block diagonal over players, and player i's block is the incidence
  // matrix of a disjoint union of complete graphs on m_i vertices, whose
  // Laplacian pseudo-inverse is the per-clique centering divided by m_i.
  // Hence D† = Dᵀ with player i's rows scaled by 1/m_i.
  static SparseMatrix make_deviation_pinv(const ResponseGraph& graph) {
    const GameShape& shape = graph.shape;
    const std::size_t n = shape.total_profiles();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * graph.num_edges());
    for (std::size_t e = 0; e < graph.num_edges(); ++e) {
      const Edge& edge = graph.edges[e];
      const double w = 1.0 / static_cast<double>(shape.actions(edge.player));
      t.emplace_back(static_cast<int>(edge.player * n + edge.target), static_cast<int>(e), w);
      t.emplace_back(static_cast<int>(edge.player * n + edge.source), static_cast<int>(e), -w);
    }
    SparseMatrix m(static_cast<Eigen::Index>(shape.num_players() * n), static_cast<Eigen::Index>(graph.num_edges()));
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  static Eigen::MatrixXd projection_from(const ResponseGraph& graph, const Eigen::MatrixXd& lpinv) {
    const auto e = static_cast<Eigen::Index>(graph.num_edges());
    const auto n = static_cast<Eigen::Index>(graph.num_nodes());
    // rows of δ₀L† are differences of rows of L†
    Eigen::MatrixXd left(e, n);
    for (Eigen::Index r = 0; r < e; ++r) {
      const Edge& edge = graph.edges[static_cast<std::size_t>(r)];
      left.row(r) = lpinv.row(static_cast<Eigen::Index>(edge.target)) - lpinv.row(static_cast<Eigen::Index>(edge.source));
    }
    Eigen::MatrixXd pi(e, e);
    for (Eigen::Index c = 0; c < e; ++c) {
      const Edge& edge = graph.edges[static_cast<std::size_t>(c)];
      pi.col(c) = left.col(static_cast<Eigen::Index>(edge.target)) - left.col(static_cast<Eigen::Index>(edge.source));
    }
    return pi;
  }

  ResponseGraph graph_;
  SparseMatrix deviation_;
  SparseMatrix gradient_;
  Eigen::MatrixXd laplacian_pinv_;
  std::optional<Eigen::MatrixXd> projection_;
  SparseMatrix deviation_pinv_;
};

inline void check_shape(const DecompositionOperators& ops, const GameShape& shape) {
  if (!(ops.shape() == shape)) {
    throw std::invalid_argument("game shape " + shape.label() + " does not match operators for " +
                                ops.shape().label());
  }
}

/// Payoffs stacked player-major, as D expects.
inline Eigen::VectorXd stack_payoffs(const NormalFormGame& g) {
  const std::size_t n = g.shape().total_profiles();
  Eigen::VectorXd u(static_cast<Eigen::Index>(g.num_players() * n));
  for (std::size_t i = 0; i < g.num_players(); ++i)
    for (std::size_t p = 0; p < n; ++p) u[static_cast<Eigen::Index>(i * n + p)] = g.payoff(i, p);
  return u;
}

inline NormalFormGame unstack_payoffs(const GameShape& shape, const Eigen::VectorXd& u) {
  const std::size_t n = shape.total_profiles();
  std::vector<std::vector<double>> payoffs(shape.num_players(), std::vector<double>(n));
  for (std::size_t i = 0; i < shape.num_players(); ++i)
    for (std::size_t p = 0; p < n; ++p) payoffs[i][p] = u[static_cast<Eigen::Index>(i * n + p)];
  return NormalFormGame(shape, std::move(payoffs));
}

/// (Du)_e = u_i(target) - u_i(source) for the deviating player i.
inline Flow deviation_flow(const DecompositionOperators& ops, const NormalFormGame& g) {
  check_shape(ops, g.shape());
  const auto& edges = ops.graph().edges;
  Flow f{Eigen::VectorXd(static_cast<Eigen::Index>(edges.size()))};
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    f.values[static_cast<Eigen::Index>(e)] = g.payoff(edge.player, edge.target) - g.payoff(edge.player, edge.source);
  }
  return f;
}

/// Payoff components of u = uP + uH + uN.
struct PayoffComponents {
  NormalFormGame potential;
  NormalFormGame harmonic;
  NormalFormGame nonstrategic;
};

struct DecompositionResult {
  Flow deviation_flow;
  Flow potential_flow;
  Flow harmonic_flow;
  /// Empty for non-strategic games (zero deviation flow).
  std::optional<double> potentialness;
  std::optional<PayoffComponents> components;

  /// ‖f_H‖, the 2-norm distance from the game to its potential component.
  double distance_to_potential() const { return harmonic_flow.values.norm(); }
};

/// ‖Du‖ at or below this fraction of ‖u‖ counts as zero.
inline constexpr double kNonStrategicRelative = 1e-13;

inline std::optional<double> potentialness_from_flows(const Eigen::VectorXd& du, const Eigen::VectorXd& fp,
                                                      const Eigen::VectorXd& fh, double payoff_norm) {
  const double total = du.norm();
  if (total == 0.0 || total <= kNonStrategicRelative * payoff_norm) return std::nullopt;
  const double p = fp.norm();
  const double h = fh.norm();
  return p / (p + h);
}

/// Flow-level decomposition only (no payoff components).
inline DecompositionResult decompose_flows(const DecompositionOperators& ops, const NormalFormGame& g) {
  DecompositionResult r;
  r.deviation_flow = deviation_flow(ops, g);
  r.potential_flow.values = ops.project_potential(r.deviation_flow.values);
  r.harmonic_flow.values = r.deviation_flow.values - r.potential_flow.values;
  double payoff_norm = 0.0;
  for (const auto& u : g.all_payoffs())
    for (double x : u) payoff_norm += x * x;
  r.potentialness = potentialness_from_flows(r.deviation_flow.values, r.potential_flow.values,
                                             r.harmonic_flow.values, std::sqrt(payoff_norm));
  return r;
}

/// P(u) = ‖f_P‖ / (‖f_P‖ + ‖f_H‖); empty when the game is non-strategic.
inline std::optional<double> potentialness(const DecompositionOperators& ops, const NormalFormGame& g) {
  return decompose_flows(ops, g).potentialness;
}

/// Full decomposition including uN = u − D†Du, uP = D†ΠDu, uH = u − uN − uP.
inline DecompositionResult decompose_payoffs(const DecompositionOperators& ops, const NormalFormGame& g) {
  DecompositionResult r = decompose_flows(ops, g);
  const Eigen::VectorXd u = stack_payoffs(g);
  const Eigen::VectorXd normalized = ops.deviation_pinv() * r.deviation_flow.values;
  const Eigen::VectorXd un = u - normalized;
  const Eigen::VectorXd up = ops.deviation_pinv() * r.potential_flow.values;
  const Eigen::VectorXd uh = u - un - up;
  r.components = PayoffComponents{unstack_payoffs(g.shape(), up), unstack_payoffs(g.shape(), uh),
                                  unstack_payoffs(g.shape(), un)};
  return r;
}

/// u_α = α·uP + (1 − α)·uH.
inline NormalFormGame alpha_blend(const DecompositionResult& dec, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha_blend: alpha must lie in [0, 1]");
  if (!dec.components) throw std::invalid_argument("alpha_blend: decomposition has no payoff components");
  const auto& c = *dec.components;
  const GameShape& shape = c.potential.shape();
  std::vector<std::vector<double>> u(shape.num_players(), std::vector<double>(shape.total_profiles()));
  for (std::size_t i = 0; i < shape.num_players(); ++i)
    for (std::size_t p = 0; p < shape.total_profiles(); ++p)
      u[i][p] = alpha * c.potential.payoff(i, p) + (1.0 - alpha) * c.harmonic.payoff(i, p);
  return NormalFormGame(shape, std::move(u));
}

/// ‖Du − Dū‖ between two games of the same shape.
inline double pairwise_difference(const DecompositionOperators& ops, const NormalFormGame& a,
                                  const NormalFormGame& b) {
  return (deviation_flow(ops, a).values - deviation_flow(ops, b).values).norm();
}

}  // namespace potlab
