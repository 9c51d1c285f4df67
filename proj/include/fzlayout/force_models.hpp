#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "fzlayout/errors.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/parallel.hpp"
#include "fzlayout/random.hpp"

namespace fzlayout {

enum class Rule : std::uint8_t {
  Spring,
  Attraction,
  Repulsion,
  NodeEdgeRepulsion,
  Stress,
  LinLog,
  BinaryStress,
};

inline constexpr std::size_t kRuleCount = 7;

inline constexpr std::array<Rule, kRuleCount> kAllRules{
    Rule::Spring, Rule::Attraction, Rule::Repulsion, Rule::NodeEdgeRepulsion,
    Rule::Stress, Rule::LinLog,     Rule::BinaryStress,
};

inline constexpr std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Spring: return "spring";
    case Rule::Attraction: return "attraction";
    case Rule::Repulsion: return "repulsion";
    case Rule::NodeEdgeRepulsion: return "node-edge";
    case Rule::Stress: return "stress";
    case Rule::LinLog: return "linlog";
    case Rule::BinaryStress: return "binary-stress";
  }
  return "?";
}

inline std::optional<Rule> parse_rule(std::string_view name) {
  for (Rule r : kAllRules)
    if (rule_name(r) == name) return r;
  return std::nullopt;
}

/// Which rules are blended, with what weights, and the shared model constants.
struct ForceConfig {
  std::array<bool, kRuleCount> enabled{};
  std::array<double, kRuleCount> weights{1, 1, 1, 1, 1, 1, 1};
  double K = 1.0;                            // desired edge length
  double omega_exponent = 2.0;               // stress pair coefficient d^-alpha
  double binary_alpha = 1.0;                 // balance of the spreading term in binary stress
  int edge_repulsion_exponent = 3;           // only 3 has a closed form here
  double edge_repulsion_tail_fraction = 0.25;

  ForceConfig& enable(Rule r, double weight = 1.0) {
    enabled[static_cast<std::size_t>(r)] = true;
    weights[static_cast<std::size_t>(r)] = weight;
    return *this;
  }
  bool is_enabled(Rule r) const { return enabled[static_cast<std::size_t>(r)]; }
  double weight(Rule r) const { return weights[static_cast<std::size_t>(r)]; }

  bool needs_distances() const { return is_enabled(Rule::Spring) || is_enabled(Rule::Stress); }

  /// Pairs closer than this are treated as being exactly this far apart.
  double min_distance() const { return 1e-9 * K; }

  void validate() const {
    if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("K must be positive");
    if (!(omega_exponent >= 0.0) || !std::isfinite(omega_exponent))
      throw ConfigError("omega exponent must be nonnegative");
    if (!(binary_alpha > 0.0) || !std::isfinite(binary_alpha))
      throw ConfigError("binary stress alpha must be positive");
    if (edge_repulsion_exponent != 3)
      throw ConfigError("node-edge repulsion supports exponent 3 only");
    if (!(edge_repulsion_tail_fraction >= 0.0 && edge_repulsion_tail_fraction <= 1.0))
      throw ConfigError("node-edge tail fraction must lie in [0,1]");
    bool any = false;
    for (Rule r : kAllRules) {
      if (!is_enabled(r)) continue;
      any = true;
      if (!(weight(r) >= 0.0) || !std::isfinite(weight(r)))
        throw ConfigError("rule weight for " + std::string(rule_name(r)) + " must be nonnegative");
    }
    if (!any) throw ConfigError("no force rule enabled");
  }
};

/// Pair coefficient d^-exponent. d must be positive.
inline double pair_coefficient(double d, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (exponent == 2.0) return 1.0 / (d * d);
  return std::pow(d, -exponent);
}

namespace detail {

/// Raw difference x_i - x_j. Shorter than eps, it is replaced by a vector of
/// length eps along a direction fixed by the pair ids, antisymmetric in (i, j).
inline Vec2 separation(NodeId i, NodeId j, Vec2 xi, Vec2 xj, double eps) {
  const Vec2 delta = xi - xj;
  if (norm2(delta) >= eps * eps) return delta;
  const NodeId lo = std::min(i, j);
  const NodeId hi = std::max(i, j);
  const std::uint64_t h = splitmix64((static_cast<std::uint64_t>(lo) << 32) | hi);
  const double angle = 2.0 * std::numbers::pi * (static_cast<double>(h >> 11) * 0x1.0p-53);
  const Vec2 dir{std::cos(angle), std::sin(angle)};
  return (i == lo ? eps : -eps) * dir;
}

inline void require_distances(const Graph& g, const DistanceMatrix& d, Rule r) {
  if (d.size() != g.node_count())
    throw ConfigError(std::string(rule_name(r)) + " needs an all-pairs distance matrix");
}

// Antiderivatives along a segment are split as `analytic + multiple * unit`
// so that the large constant parts cancel exactly when both ends of the
// segment lie on the same side of the foot point.
struct SplitValue {
  double analytic = 0.0;
  int multiple = 0;
};

/// Primitive of h / (h^2 + t^2)^2 in t, unit pi / (4 h^2).
inline SplitValue normal_primitive(double t, double h) {
  if (std::abs(t) <= h) {
    const double theta = std::atan(t / h);
    return {(theta + t * h / (h * h + t * t)) / (2.0 * h * h), 0};
  }
  const double q = h / t;
  const int sign = t > 0 ? 1 : -1;
  const double z = q * q;
  if (z < 1e-2) {
    // q/(1+q^2) - atan(q) = q^3 * sum_{k>=1} (-1)^k 2k/(2k+1) q^(2k-2)
    double series = 0.0;
    double power = 1.0;
    for (int k = 1; k <= 9; ++k) {
      series += (k % 2 ? -1.0 : 1.0) * (2.0 * k / (2.0 * k + 1.0)) * power;
      power *= z;
    }
    return {0.5 * (h / (t * t * t)) * series, sign};
  }
  return {(q / (1.0 + z) - std::atan(q)) / (2.0 * h * h), sign};
}

/// Primitive of 1 / (h^2 + t^2) in t, unit pi / (2 h).
inline SplitValue potential_primitive(double t, double h) {
  if (std::abs(t) <= h) return {std::atan(t / h) / h, 0};
  return {-std::atan(h / t) / h, t > 0 ? 1 : -1};
}

struct SegmentFrame {
  Vec2 along;   // unit vector a -> b
  Vec2 normal;  // unit vector from the segment line toward the node
  double h;     // distance from the node to the line
  double t0;    // signed coordinates of a and b relative to the foot point
  double t1;
  bool on_segment;
};

inline std::optional<SegmentFrame> segment_frame(Vec2 node, Vec2 a, Vec2 b, double eps) {
  const Vec2 ab = b - a;
  const double length = norm(ab);
  if (length < eps) return std::nullopt;
  SegmentFrame f{};
  f.along = ab / length;
  const Vec2 ao = node - a;
  const double foot = dot(ao, f.along);
  const double signed_h = cross(f.along, ao);
  f.h = std::abs(signed_h);
  f.normal = signed_h >= 0.0 ? perp(f.along) : -perp(f.along);
  f.t0 = -foot;
  f.t1 = length - foot;
  f.on_segment = f.h < eps && f.t0 <= 0.0 && f.t1 >= 0.0;
  if (f.h < eps) {
    f.h = eps;
    f.normal = perp(f.along);
  }
  return f;
}

}  // namespace detail

/// Repulsion of the segment a-b on `node`: the integral over the segment of
/// K^3 / x^3 along the unit vector from each element to the node, with x the
/// element-node distance. A node lying on the segment is pushed along the
/// segment normal with magnitude K.
inline Vec2 segment_repulsion(Vec2 node, Vec2 a, Vec2 b, double K, double eps) {
  const auto frame = detail::segment_frame(node, a, b, eps);
  if (!frame) return {};
  const auto& f = *frame;
  if (f.on_segment) return K * f.normal;
  const double k3 = K * K * K;
  const double h = f.h;
  const auto p0 = detail::normal_primitive(f.t0, h);
  const auto p1 = detail::normal_primitive(f.t1, h);
  const double normal_part =
      (p1.analytic - p0.analytic) + (p1.multiple - p0.multiple) * std::numbers::pi / (4.0 * h * h);
  const double r0 = h * h + f.t0 * f.t0;
  const double r1 = h * h + f.t1 * f.t1;
  const double along_part = 0.5 / r1 - 0.5 / r0;
  return k3 * (normal_part * f.normal + along_part * f.along);
}

/// Potential whose negative gradient in the node position is segment_repulsion.
inline double segment_potential(Vec2 node, Vec2 a, Vec2 b, double K, double eps) {
  const auto frame = detail::segment_frame(node, a, b, eps);
  if (!frame) return 0.0;
  const auto& f = *frame;
  const double h = f.h;
  const auto p0 = detail::potential_primitive(f.t0, h);
  const auto p1 = detail::potential_primitive(f.t1, h);
  const double integral =
      (p1.analytic - p0.analytic) + (p1.multiple - p0.multiple) * std::numbers::pi / (2.0 * h);
  return 0.5 * K * K * K * integral;
}

/// Force of a single rule on node v, evaluated against layout x.
inline Vec2 rule_node_force(Rule rule, const Graph& g, const DistanceMatrix& d, const Layout& x,
                            const ForceConfig& cfg, NodeId v) {
  const std::size_t n = g.node_count();
  const double K = cfg.K;
  const double eps = cfg.min_distance();
  const Vec2 xv = x[v];
  Vec2 f{};
  switch (rule) {
    case Rule::Spring: {
      detail::require_distances(g, d, rule);
      for (NodeId j = 0; j < n; ++j) {
        if (j == v) continue;
        const Vec2 delta = detail::separation(v, j, xv, x[j], eps);
        const double r = norm(delta);
        const double dij = d(v, j);
        f -= ((r - K * dij) / (dij * dij * r)) * delta;
      }
      break;
    }
    case Rule::Attraction:
      for (const auto& nb : g.neighbors(v)) {
        const Vec2 delta = detail::separation(v, nb.node, xv, x[nb.node], eps);
        f -= (norm(delta) / K) * delta;
      }
      break;
    case Rule::Repulsion:
      for (NodeId j = 0; j < n; ++j) {
        if (j == v) continue;
        const Vec2 delta = detail::separation(v, j, xv, x[j], eps);
        f += (K * K / norm2(delta)) * delta;
      }
      break;
    case Rule::NodeEdgeRepulsion:
      for (const auto& e : g.edges()) {
        if (e.u == v || e.v == v) continue;
        f += segment_repulsion(xv, x[e.u], x[e.v], K, eps);
      }
      break;
    case Rule::Stress: {
      detail::require_distances(g, d, rule);
      double total_weight = 0.0;
      for (NodeId j = 0; j < n; ++j) {
        if (j == v) continue;
        const Vec2 delta = detail::separation(v, j, xv, x[j], eps);
        const double r = norm(delta);
        const double dij = d(v, j);
        const double w = pair_coefficient(dij, cfg.omega_exponent);
        total_weight += w;
        f -= (w * (r - K * dij) / r) * delta;
      }
      if (total_weight > 0.0) f = f / total_weight;
      break;
    }
    case Rule::LinLog:
      for (const auto& nb : g.neighbors(v)) {
        const Vec2 delta = detail::separation(v, nb.node, xv, x[nb.node], eps);
        f -= delta / norm(delta);
      }
      for (NodeId j = 0; j < n; ++j) {
        if (j == v) continue;
        const Vec2 delta = detail::separation(v, j, xv, x[j], eps);
        f += delta / norm2(delta);
      }
      break;
    case Rule::BinaryStress:
      for (const auto& nb : g.neighbors(v)) f -= detail::separation(v, nb.node, xv, x[nb.node], eps);
      for (NodeId j = 0; j < n; ++j) {
        if (j == v) continue;
        const Vec2 delta = detail::separation(v, j, xv, x[j], eps);
        const double r = norm(delta);
        f -= (cfg.binary_alpha * (r - K) / r) * delta;
      }
      break;
  }
  return f;
}

inline ForceField rule_force(Rule rule, const Graph& g, const DistanceMatrix& d, const Layout& x,
                             const ForceConfig& cfg) {
  ForceField field(g.node_count());
  parallel_for(g.node_count(),
               [&](std::size_t v) { field[v] = rule_node_force(rule, g, d, x, cfg, static_cast<NodeId>(v)); });
  return field;
}

inline ForceField node_edge_repulsion(const Graph& g, const Layout& x, const ForceConfig& cfg) {
  return rule_force(Rule::NodeEdgeRepulsion, g, DistanceMatrix{}, x, cfg);
}

/// Node-edge repulsion only acts in the final fraction of the run.
inline bool node_edge_active(const ForceConfig& cfg, double iteration_phase) {
  return iteration_phase >= 1.0 - cfg.edge_repulsion_tail_fraction;
}

inline bool rule_active(const ForceConfig& cfg, Rule r, double iteration_phase) {
  if (!cfg.is_enabled(r)) return false;
  return r != Rule::NodeEdgeRepulsion || node_edge_active(cfg, iteration_phase);
}

/// Weighted blend of all active rules on node v.
inline Vec2 composite_node_force(const Graph& g, const DistanceMatrix& d, const Layout& x,
                                 const ForceConfig& cfg, double iteration_phase, NodeId v) {
  Vec2 f{};
  for (Rule r : kAllRules) {
    if (!rule_active(cfg, r, iteration_phase)) continue;
    const double w = cfg.weight(r);
    if (w == 0.0) continue;
    f += w * rule_node_force(r, g, d, x, cfg, v);
  }
  return f;
}

inline ForceField composite_force(const Graph& g, const DistanceMatrix& d, const Layout& x,
                                  const ForceConfig& cfg, double iteration_phase) {
  ForceField field(g.node_count());
  parallel_for(g.node_count(), [&](std::size_t v) {
    field[v] = composite_node_force(g, d, x, cfg, iteration_phase, static_cast<NodeId>(v));
  });
  return field;
}

// ---------------------------------------------------------------------------
// Energies

/// Sum over i<j of w_ij (|X_i - X_j| - K d_ij)^2 with w_ij = d_ij^-omega_exponent.
inline double stress_energy(const Graph& g, const DistanceMatrix& d, const Layout& x,
                            const ForceConfig& cfg) {
  detail::require_distances(g, d, Rule::Stress);
  const std::size_t n = g.node_count();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dev = norm(x[i] - x[j]) - cfg.K * d(i, j);
      s += pair_coefficient(d(i, j), cfg.omega_exponent) * dev * dev;
    }
  return s;
}

/// Sum over i<j of (|X_i - X_j| - K d_ij)^2 / (2 d_ij^2).
inline double spring_energy(const Graph& g, const DistanceMatrix& d, const Layout& x,
                            const ForceConfig& cfg) {
  detail::require_distances(g, d, Rule::Spring);
  const std::size_t n = g.node_count();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dev = norm(x[i] - x[j]) - cfg.K * d(i, j);
      s += 0.5 * dev * dev / (d(i, j) * d(i, j));
    }
  return s;
}

/// Sum over edges of |X_i - X_j|^3 / (3K).
inline double attraction_energy(const Graph& g, const Layout& x, const ForceConfig& cfg) {
  double s = 0.0;
  for (const auto& e : g.edges()) {
    const double r = norm(x[e.u] - x[e.v]);
    s += r * r * r / (3.0 * cfg.K);
  }
  return s;
}

/// Sum over i<j of -K^2 ln |X_i - X_j|, distances clamped below at the minimum pair distance.
inline double repulsion_energy(const Graph& g, const Layout& x, const ForceConfig& cfg) {
  const std::size_t n = g.node_count();
  const double eps = cfg.min_distance();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s -= std::log(std::max(norm(x[i] - x[j]), eps));
  return cfg.K * cfg.K * s;
}

namespace detail {

inline double linlog_energy(const Graph& g, const Layout& x, std::optional<double> clamp) {
  double s = 0.0;
  for (const auto& e : g.edges()) s += norm(x[e.u] - x[e.v]);
  const std::size_t n = g.node_count();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double r = norm(x[i] - x[j]);
      if (clamp) {
        r = std::max(r, *clamp);
      } else if (r == 0.0) {
        throw ValidationError("linlog energy undefined: nodes " + std::to_string(i) + " and " +
                              std::to_string(j) + " coincide");
      }
      s -= std::log(r);
    }
  return s;
}

}  // namespace detail

/// Sum over edges of |X_i - X_j| minus the sum over unordered distinct pairs of ln |X_i - X_j|.
inline double linlog_energy(const Graph& g, const Layout& x) {
  return detail::linlog_energy(g, x, std::nullopt);
}

/// Sum over edges of |X_i - X_j|^2 plus binary_alpha times the sum over
/// unordered distinct pairs of (|X_i - X_j| - K)^2.
inline double binary_stress_energy(const Graph& g, const Layout& x, const ForceConfig& cfg) {
  double edges = 0.0;
  for (const auto& e : g.edges()) edges += norm2(x[e.u] - x[e.v]);
  const std::size_t n = g.node_count();
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dev = norm(x[i] - x[j]) - cfg.K;
      spread += dev * dev;
    }
  return edges + cfg.binary_alpha * spread;
}

/// Sum over (node, non-incident edge) of segment_potential.
inline double node_edge_energy(const Graph& g, const Layout& x, const ForceConfig& cfg) {
  double s = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v)
    for (const auto& e : g.edges()) {
      if (e.u == v || e.v == v) continue;
      s += segment_potential(x[v], x[e.u], x[e.v], cfg.K, cfg.min_distance());
    }
  return s;
}

inline double rule_energy(Rule rule, const Graph& g, const DistanceMatrix& d, const Layout& x,
                          const ForceConfig& cfg) {
  switch (rule) {
    case Rule::Spring: return spring_energy(g, d, x, cfg);
    case Rule::Attraction: return attraction_energy(g, x, cfg);
    case Rule::Repulsion: return repulsion_energy(g, x, cfg);
    case Rule::NodeEdgeRepulsion: return node_edge_energy(g, x, cfg);
    case Rule::Stress: return stress_energy(g, d, x, cfg);
    case Rule::LinLog: return detail::linlog_energy(g, x, cfg.min_distance());
    case Rule::BinaryStress: return binary_stress_energy(g, x, cfg);
  }
  return 0.0;
}

/// Weighted sum of the energies of the active rules.
inline double composite_energy(const Graph& g, const DistanceMatrix& d, const Layout& x,
                               const ForceConfig& cfg, double iteration_phase) {
  double s = 0.0;
  for (Rule r : kAllRules) {
    if (!rule_active(cfg, r, iteration_phase)) continue;
    const double w = cfg.weight(r);
    if (w == 0.0) continue;
    s += w * rule_energy(r, g, d, x, cfg);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Stress-derived quality metrics

/// Pair sums shared by the normalized stress and the equilibrium residual,
/// all over i<j with target K d_ij and w_ij = d_ij^-omega_exponent.
struct StressSums {
  double weighted_sq_length = 0.0;      // sum w |dX|^2
  double weighted_target_length = 0.0;  // sum w K d |dX|
  double weighted_sq_target = 0.0;      // sum w (K d)^2

  StressSums& operator+=(const StressSums& o) {
    weighted_sq_length += o.weighted_sq_length;
    weighted_target_length += o.weighted_target_length;
    weighted_sq_target += o.weighted_sq_target;
    return *this;
  }
};

inline StressSums stress_sums(const Graph& g, const DistanceMatrix& d, const Layout& x,
                              const ForceConfig& cfg) {
  detail::require_distances(g, d, Rule::Stress);
  StressSums s;
  const std::size_t n = g.node_count();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = pair_coefficient(d(i, j), cfg.omega_exponent);
      const double r = norm(x[i] - x[j]);
      const double target = cfg.K * d(i, j);
      s.weighted_sq_length += w * r * r;
      s.weighted_target_length += w * target * r;
      s.weighted_sq_target += w * target * target;
    }
  return s;
}

/// Scale-free stress: sum w |dX|^2 / (sum w K d |dX|)^2.
inline std::optional<double> normalized_stress(const StressSums& s) {
  if (!(s.weighted_target_length > 0.0)) return std::nullopt;
  return s.weighted_sq_length / (s.weighted_target_length * s.weighted_target_length);
}

inline double normalized_stress_U(const Graph& g, const DistanceMatrix& d, const Layout& x,
                                  const ForceConfig& cfg) {
  const auto u = normalized_stress(stress_sums(g, d, x, cfg));
  if (!u) throw ValidationError("normalized stress undefined: all nodes coincide");
  return *u;
}

/// Relative violation of the stress-optimality identity
/// sum w |dX|^2 = sum w K d |dX|, normalized by sum w (K d)^2.
inline std::optional<double> equilibrium_residual(const StressSums& s) {
  if (!(s.weighted_sq_target > 0.0)) return std::nullopt;
  return std::abs(s.weighted_sq_length - s.weighted_target_length) / s.weighted_sq_target;
}

inline std::optional<double> equilibrium_residual(const Graph& g, const DistanceMatrix& d, const Layout& x,
                                                  const ForceConfig& cfg) {
  return equilibrium_residual(stress_sums(g, d, x, cfg));
}

}  // namespace fzlayout
