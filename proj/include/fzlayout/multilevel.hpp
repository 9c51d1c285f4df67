#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fzlayout/errors.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/optimizer.hpp"
#include "fzlayout/random.hpp"
#include "fzlayout/refinement.hpp"

namespace fzlayout {

inline std::optional<MatchPriority> parse_match_priority(std::string_view s) {
  if (s == "first") return MatchPriority::FirstAvailable;
  if (s == "random") return MatchPriority::Random;
  if (s == "heavy") return MatchPriority::HeavyEdge;
  if (s == "lowweight") return MatchPriority::LowNodeWeight;
  if (s == "commonneighbors") return MatchPriority::CommonNeighbors;
  return std::nullopt;
}

enum class CoarseningKind { EC, MIVS };

struct CoarseningResult {
  Graph coarse;
  std::vector<NodeId> parent_of;  // fine node -> coarse node
  CoarseningKind kind = CoarseningKind::EC;
  std::vector<NodeId> members;    // MIVS only: coarse node -> its fine member
};

/// 1 - 2|N[u] & N[v]| / |N[u] | N[v]| over closed neighborhoods.
inline double semi_distance(const Graph& g, NodeId u, NodeId v) {
  if (u == v) throw ValidationError("semi-distance needs two distinct nodes");
  auto closed = [&](NodeId a) {
    std::vector<NodeId> out{a};
    for (const auto& nb : g.neighbors(a)) out.push_back(nb.node);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto nu = closed(u);
  const auto nv = closed(v);
  std::vector<NodeId> common;
  std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
  const double uni = static_cast<double>(nu.size() + nv.size() - common.size());
  return 1.0 - 2.0 * static_cast<double>(common.size()) / uni;
}

/// Greedy maximal matching. Nodes are visited in ascending id order and each
/// unmatched node takes its best unmatched neighbor under the priority.
inline std::vector<std::pair<NodeId, NodeId>> greedy_matching(const Graph& g, MatchPriority priority,
                                                              std::uint64_t seed) {
  const std::size_t n = g.node_count();
  std::vector<bool> matched(n, false);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  Rng rng(seed);
  std::vector<NodeId> candidates;
  for (NodeId u = 0; u < n; ++u) {
    if (matched[u]) continue;
    candidates.clear();
    for (const auto& nb : g.neighbors(u))
      if (!matched[nb.node]) candidates.push_back(nb.node);
    if (candidates.empty()) continue;
    NodeId best = candidates.front();
    switch (priority) {
      case MatchPriority::FirstAvailable:
        break;
      case MatchPriority::Random:
        best = candidates[rng.index(candidates.size())];
        break;
      case MatchPriority::HeavyEdge: {
        double w = -1.0;
        for (const auto& nb : g.neighbors(u))
          if (!matched[nb.node] && nb.weight > w) {
            w = nb.weight;
            best = nb.node;
          }
        break;
      }
      case MatchPriority::LowNodeWeight: {
        double w = 0.0;
        bool first = true;
        for (NodeId c : candidates)
          if (first || g.node_weight(c) < w) {
            w = g.node_weight(c);
            best = c;
            first = false;
          }
        break;
      }
      case MatchPriority::CommonNeighbors: {
        double s = 2.0;
        for (NodeId c : candidates) {
          const double sd = semi_distance(g, u, c);
          if (sd < s) {
            s = sd;
            best = c;
          }
        }
        break;
      }
    }
    matched[u] = matched[best] = true;
    pairs.emplace_back(u, best);
  }
  return pairs;
}

namespace detail {

/// Coarse ids are assigned in ascending order of each group's smallest member.
inline CoarseningResult aggregate(const Graph& g, std::vector<NodeId> group_of, CoarseningKind kind) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> rank(n, static_cast<NodeId>(-1));
  NodeId next = 0;
  for (NodeId v = 0; v < n; ++v)
    if (rank[group_of[v]] == static_cast<NodeId>(-1)) rank[group_of[v]] = next++;
  for (auto& p : group_of) p = rank[p];
  Graph coarse = quotient_graph(g, group_of, next);
  return {std::move(coarse), std::move(group_of), kind, {}};
}

}  // namespace detail

/// Edge-collapse coarsening: matched pairs merge, everything else copies.
inline CoarseningResult coarsen_ec(const Graph& g, MatchPriority priority, std::uint64_t seed) {
  std::vector<NodeId> group(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) group[v] = v;
  for (auto [a, b] : greedy_matching(g, priority, seed)) group[std::max(a, b)] = std::min(a, b);
  return detail::aggregate(g, std::move(group), CoarseningKind::EC);
}

/// Greedy maximal independent set in ascending id order.
inline std::vector<bool> greedy_independent_set(const Graph& g) {
  std::vector<bool> member(g.node_count(), false);
  std::vector<bool> blocked(g.node_count(), false);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (blocked[v]) continue;
    member[v] = true;
    for (const auto& nb : g.neighbors(v)) blocked[nb.node] = true;
  }
  return member;
}

/// MIVS coarsening. Members become coarse nodes, joined when at most three
/// hops apart; every other node maps to its lowest-id adjacent member.
inline CoarseningResult coarsen_mivs(const Graph& g) {
  const std::size_t n = g.node_count();
  const auto member = greedy_independent_set(g);
  std::vector<NodeId> coarse_id(n, 0);
  std::vector<NodeId> members;
  for (NodeId v = 0; v < n; ++v)
    if (member[v]) {
      coarse_id[v] = static_cast<NodeId>(members.size());
      members.push_back(v);
    }

  std::vector<NodeId> parent(n);
  std::vector<double> weights(members.size(), 0.0);
  for (NodeId v = 0; v < n; ++v) {
    if (member[v]) {
      parent[v] = coarse_id[v];
    } else {
      // Maximality guarantees an adjacent member; neighbors are sorted.
      for (const auto& nb : g.neighbors(v))
        if (member[nb.node]) {
          parent[v] = coarse_id[nb.node];
          break;
        }
    }
    weights[parent[v]] += g.node_weight(v);
  }

  std::vector<Edge> edges;
  std::vector<int> depth(n, -1);
  std::vector<NodeId> frontier, next, touched;
  for (NodeId a : members) {
    frontier.assign(1, a);
    touched.assign(1, a);
    depth[a] = 0;
    for (int level = 1; level <= 3 && !frontier.empty(); ++level) {
      next.clear();
      for (NodeId u : frontier)
        for (const auto& nb : g.neighbors(u)) {
          if (depth[nb.node] >= 0) continue;
          depth[nb.node] = level;
          touched.push_back(nb.node);
          next.push_back(nb.node);
          if (member[nb.node] && nb.node > a) edges.push_back({coarse_id[a], coarse_id[nb.node], 1.0});
        }
      std::swap(frontier, next);
    }
    for (NodeId t : touched) depth[t] = -1;
  }
  Graph coarse(members.size(), edges, std::move(weights));
  return {std::move(coarse), std::move(parent), CoarseningKind::MIVS, std::move(members)};
}

/// Moves every node of an exactly coincident group 0.5e-2*K away from the
/// shared point in a seeded random direction.
inline void separate_coincident(Layout& x, double K, std::uint64_t seed) {
  std::map<std::pair<double, double>, std::vector<NodeId>> groups;
  for (NodeId v = 0; v < x.size(); ++v) groups[{x[v].x, x[v].y}].push_back(v);
  Rng rng(seed);
  for (NodeId v = 0; v < x.size(); ++v) {
    const auto& group = groups[{x[v].x, x[v].y}];
    if (group.size() < 2 || group.front() != v) continue;
    const Vec2 base = x[v];
    for (NodeId member : group) x[member] = base + (0.5e-2 * K) * rng.unit_vector();
  }
}

/// Initial fine positions from a coarse layout. EC children take their
/// parent's position; MIVS non-members take the mean of their member
/// neighbours. Coincident results are jittered apart.
inline Layout interpolate_positions(const CoarseningResult& result, const Layout& coarse_layout, const Graph& fine,
                                    double K, std::uint64_t seed) {
  if (coarse_layout.size() != result.coarse.node_count())
    throw ValidationError("coarse layout has " + std::to_string(coarse_layout.size()) + " positions for " +
                          std::to_string(result.coarse.node_count()) + " coarse nodes");
  if (result.parent_of.size() != fine.node_count())
    throw ValidationError("coarsening does not match the fine graph");
  const std::size_t n = fine.node_count();
  Layout x(n);
  if (result.kind == CoarseningKind::EC) {
    for (NodeId v = 0; v < n; ++v) x[v] = coarse_layout[result.parent_of[v]];
  } else {
    std::vector<bool> is_member(n, false);
    for (NodeId m : result.members) is_member[m] = true;
    for (NodeId v = 0; v < n; ++v) {
      if (is_member[v]) {
        x[v] = coarse_layout[result.parent_of[v]];
        continue;
      }
      Vec2 sum{};
      std::size_t count = 0;
      for (const auto& nb : fine.neighbors(v))
        if (is_member[nb.node]) {
          sum += coarse_layout[result.parent_of[nb.node]];
          ++count;
        }
      x[v] = count > 0 ? (1.0 / static_cast<double>(count)) * sum : coarse_layout[result.parent_of[v]];
    }
  }
  separate_coincident(x, K, seed);
  return x;
}

inline std::optional<RescaleStrategy> parse_rescale(std::string_view s) {
  if (s == "avg") return RescaleStrategy::AverageEdgeLength;
  if (s == "diameter") return RescaleStrategy::DiameterRatio;
  if (s == "walshaw") return RescaleStrategy::WalshawFixed;
  return std::nullopt;
}

/// Desired edge length for the finer level.
inline double rescale_level(const Graph& fine, const Graph& coarse, double K_coarse, const Layout& fine_layout,
                            RescaleStrategy strategy) {
  double K = K_coarse;
  switch (strategy) {
    case RescaleStrategy::AverageEdgeLength: {
      if (fine.edge_count() == 0) break;
      double sum = 0.0;
      for (const auto& e : fine.edges()) sum += norm(fine_layout[e.u] - fine_layout[e.v]);
      K = sum / static_cast<double>(fine.edge_count());
      break;
    }
    case RescaleStrategy::DiameterRatio: {
      if (coarse.node_count() < 2 || fine.node_count() < 2) break;
      const double gamma = graph_diameter(fine, DistanceMode::Hops) / graph_diameter(coarse, DistanceMode::Hops);
      K = K_coarse / gamma;
      break;
    }
    case RescaleStrategy::WalshawFixed:
      K = K_coarse / std::sqrt(1.75);
      break;
  }
  if (!(K > 0.0) || !std::isfinite(K)) K = K_coarse;
  return K;
}

/// Coarsen-then-refine layout with EC or MIVS coarsening. Coarsening stops below the
/// threshold, on an edgeless level, or when a level shrinks by less than 5%.
/// Every level is refined at the configured K: interpolated coordinates are
/// scaled by K / K_fine, where K_fine comes from the rescale strategy.
inline PipelineResult multilevel_layout(const Graph& g, const MultilevelSettings& s, CoarseningKind kind) {
  s.force.validate();
  s.optimizer.validate();
  require_connected(g);
  const double K = s.force.K;
  std::vector<Graph> graphs{g};
  std::vector<CoarseningResult> steps;
  while (graphs.back().node_count() >= s.threshold && graphs.back().edge_count() > 0) {
    const Graph& cur = graphs.back();
    const std::uint64_t tag = 16 * (steps.size() + 1) + 1;
    CoarseningResult r =
        kind == CoarseningKind::EC ? coarsen_ec(cur, s.priority, derive_seed(s.seed, tag)) : coarsen_mivs(cur);
    if (static_cast<double>(r.coarse.node_count()) > 0.95 * static_cast<double>(cur.node_count())) break;
    graphs.push_back(r.coarse);
    steps.push_back(std::move(r));
  }

  PipelineResult out;
  const std::size_t L = steps.size();
  Layout x = random_layout(graphs[L].node_count(), K, derive_seed(s.seed, 16 * L));
  x = refine_level(graphs[L], level_distances(graphs[L], L == 0, s), std::move(x), s, out);
  for (std::size_t i = L; i-- > 0;) {
    Layout fine = interpolate_positions(steps[i], x, graphs[i], K, derive_seed(s.seed, 16 * i + 2));
    const double K_fine = rescale_level(graphs[i], graphs[i + 1], K, fine, s.rescale);
    scale_layout(fine, K_fine, K);
    x = refine_level(graphs[i], level_distances(graphs[i], i == 0, s), std::move(fine), s, out);
  }
  out.layout = std::move(x);
  out.levels.assign(graphs.begin() + 1, graphs.end());
  return out;
}

}  // namespace fzlayout
