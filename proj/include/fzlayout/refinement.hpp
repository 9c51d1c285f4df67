#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fzlayout/force_models.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/optimizer.hpp"

namespace fzlayout {

enum class MatchPriority { FirstAvailable, Random, HeavyEdge, LowNodeWeight, CommonNeighbors };
enum class RescaleStrategy { AverageEdgeLength, DiameterRatio, WalshawFixed };

/// Everything a multilevel pipeline needs besides the graph.
struct MultilevelSettings {
  ForceConfig force;
  OptimizerParams optimizer;
  std::size_t threshold = 10;
  std::uint64_t seed = 0;
  DistanceMode distance_mode = DistanceMode::Weighted;  // finest level; coarse levels count hops
  MatchPriority priority = MatchPriority::HeavyEdge;
  RescaleStrategy rescale = RescaleStrategy::AverageEdgeLength;
  int fuzzy_hop_limit = 2;
  double fuzzy_prune_tau = 1e-3;
  int constrained_passes = 20;
};

struct MembershipEntry {
  NodeId part = 0;
  NodeId node = 0;
  double value = 0.0;
};

struct PipelineResult {
  Layout layout;
  std::vector<TraceEntry> trace;
  long total_iterations = 0;
  std::vector<Graph> levels;                                // coarse graphs, finest first
  std::vector<std::vector<MembershipEntry>> memberships;    // fuzzy only, one per coarse level
};

inline DistanceMatrix level_distances(const Graph& g, bool finest, const MultilevelSettings& s) {
  if (!s.force.needs_distances()) return DistanceMatrix{};
  return shortest_path_distances(g, finest ? s.distance_mode : DistanceMode::Hops);
}

/// Runs the two-phase optimizer on one level and appends its trace.
inline Layout refine_level(const Graph& g, const DistanceMatrix& d, Layout x0, const MultilevelSettings& s,
                           PipelineResult& out) {
  auto run = force_directed_layout(g, d, s.force, s.optimizer, std::move(x0));
  for (auto entry : run.trace) {
    entry.iteration += out.total_iterations;
    out.trace.push_back(entry);
  }
  out.total_iterations += run.iterations;
  return std::move(run.layout);
}

struct Circle {
  Vec2 center;
  double radius = 0.0;  // 0 pins the node at the center
};

/// Radial projection onto the closed disk. The result satisfies
/// norm(q - center) <= radius as evaluated in floating point.
inline Vec2 clip_to_circle(const Circle& c, Vec2 p) {
  if (!(c.radius > 0.0)) return c.center;
  const Vec2 off = p - c.center;
  const double r = norm(off);
  if (r <= c.radius) return p;
  double f = c.radius / r;
  Vec2 q = c.center + f * off;
  while (norm(q - c.center) > c.radius) {
    f *= 1.0 - 0x1.0p-50;
    q = c.center + f * off;
  }
  return q;
}

/// Steepest-descent passes in which every node is kept inside its own
/// circle; a step that leaves it is pulled back radially onto the boundary.
inline void constrained_passes(const Graph& g, const DistanceMatrix& d, Layout& x, const std::vector<Circle>& area,
                               const MultilevelSettings& s, PipelineResult& out) {
  const std::size_t n = g.node_count();
  if (s.constrained_passes <= 0 || n == 0) return;
  OptimizerState state = OptimizerState::initial(n, s.force.K);
  for (std::size_t v = 0; v < n; ++v)
    state.heat[v] = area[v].radius > 0.0 ? std::min(s.force.K, area[v].radius) : s.force.K;
  const PositionConstraint clip = [&](NodeId v, Vec2 p) { return clip_to_circle(area[v], p); };
  for (int it = 0; it < s.constrained_passes; ++it) {
    steepest_descent_pass(g, d, x, s.force, state, s.optimizer, 0.0, clip);
    detail::check_finite(x, out.total_iterations);
    out.trace.push_back({out.total_iterations, Phase::SteepestDescent, composite_energy(g, d, x, s.force, 0.0),
                         state.temperature});
    ++out.total_iterations;
  }
}

/// Scales a layout about the origin so that its desired edge length goes
/// from K_from to K_to.
inline void scale_layout(Layout& x, double K_from, double K_to) {
  if (!(K_from > 0.0) || K_from == K_to) return;
  const double f = K_to / K_from;
  for (auto& p : x) p = f * p;
}

inline double min_pairwise_distance(const Layout& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) best = std::min(best, norm(x[i] - x[j]));
  return best;
}

}  // namespace fzlayout
