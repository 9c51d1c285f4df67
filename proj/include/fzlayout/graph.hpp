#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "fzlayout/errors.hpp"
#include "fzlayout/parallel.hpp"

namespace fzlayout {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node = 0;
  double weight = 1.0;
};

/// Weighted undirected graph with dense node ids 0..n-1.
///
/// Construction normalizes the edge list: self-loops are dropped, parallel
/// edges are merged by summing their weights, every edge is stored with u < v
/// and the list is sorted by (u, v). Immutable afterwards.
class Graph {
public:
  Graph() = default;

  explicit Graph(std::size_t node_count, const std::vector<Edge>& edges = {},
                 std::vector<double> node_weights = {})
      : node_weights_(std::move(node_weights)) {
    if (node_weights_.empty()) node_weights_.assign(node_count, 1.0);
    if (node_weights_.size() != node_count)
      throw ValidationError("node weight count " + std::to_string(node_weights_.size()) +
                            " does not match node count " + std::to_string(node_count));
    for (std::size_t i = 0; i < node_count; ++i)
      if (!(node_weights_[i] > 0.0) || !std::isfinite(node_weights_[i]))
        throw ValidationError("node " + std::to_string(i) + " has non-positive weight");

    std::map<std::pair<NodeId, NodeId>, double> merged;
    for (const auto& e : edges) {
      if (e.u >= node_count || e.v >= node_count)
        throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") references a node outside 0.." + std::to_string(node_count));
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw ValidationError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") has non-positive weight");
      if (e.u == e.v) continue;
      merged[std::minmax(e.u, e.v)] += e.weight;
    }
    edges_.reserve(merged.size());
    for (const auto& [key, w] : merged) edges_.push_back({key.first, key.second, w});

    offsets_.assign(node_count + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[cursor[e.u]++] = {e.v, e.weight};
      adjacency_[cursor[e.v]++] = {e.u, e.weight};
    }
    for (std::size_t i = 0; i < node_count; ++i)
      std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }

  std::size_t node_count() const noexcept { return node_weights_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> node_weights() const noexcept { return node_weights_; }
  double node_weight(NodeId v) const { return node_weights_[v]; }

  /// Neighbors of v sorted by ascending id.
  std::span<const Neighbor> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  std::optional<double> edge_weight(NodeId u, NodeId v) const {
    const auto nb = neighbors(u);
    const auto it = std::lower_bound(nb.begin(), nb.end(), v,
                                     [](const Neighbor& a, NodeId id) { return a.node < id; });
    if (it == nb.end() || it->node != v) return std::nullopt;
    return it->weight;
  }
  bool has_edge(NodeId u, NodeId v) const { return edge_weight(u, v).has_value(); }

  bool unit_edge_weights() const noexcept {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.weight == 1.0; });
  }

  double total_node_weight() const noexcept {
    double s = 0.0;
    for (double w : node_weights_) s += w;
    return s;
  }
  double total_edge_weight() const noexcept {
    double s = 0.0;
    for (const auto& e : edges_) s += e.weight;
    return s;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_weights_ == b.node_weights_ && a.edges_ == b.edges_;
  }

private:
  std::vector<double> node_weights_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// Dense symmetric n x n matrix of shortest-path distances.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }

  double max() const noexcept {
    double m = 0.0;
    for (double d : data_) m = std::max(m, d);
    return m;
  }

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Whether distances follow edge weights or count hops.
enum class DistanceMode { Weighted, Hops };

constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Single-source shortest paths. BFS for unit weights or hop mode, Dijkstra otherwise.
/// Unreachable nodes get kUnreachable.
inline std::vector<double> single_source_distances(const Graph& g, NodeId source,
                                                   DistanceMode mode = DistanceMode::Weighted) {
  std::vector<double> dist(g.node_count(), kUnreachable);
  dist[source] = 0.0;
  if (mode == DistanceMode::Hops || g.unit_edge_weights()) {
    std::vector<NodeId> frontier{source};
    std::size_t head = 0;
    while (head < frontier.size()) {
      const NodeId u = frontier[head++];
      for (const auto& nb : g.neighbors(u)) {
        if (dist[nb.node] != kUnreachable) continue;
        dist[nb.node] = dist[u] + 1.0;
        frontier.push_back(nb.node);
      }
    }
    return dist;
  }
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : g.neighbors(u)) {
      const double nd = d + nb.weight;
      if (nd < dist[nb.node]) {
        dist[nb.node] = nd;
        queue.push({nd, nb.node});
      }
    }
  }
  return dist;
}

/// Maximal connected node sets, each sorted ascending, ordered by smallest member.
inline std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  std::vector<std::vector<NodeId>> components;
  std::vector<bool> seen(g.node_count(), false);
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> members{s};
    seen[s] = true;
    for (std::size_t head = 0; head < members.size(); ++head)
      for (const auto& nb : g.neighbors(members[head]))
        if (!seen[nb.node]) {
          seen[nb.node] = true;
          members.push_back(nb.node);
        }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

inline bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

/// Throws GraphError naming two mutually unreachable nodes.
inline void require_connected(const Graph& g) {
  const auto comps = connected_components(g);
  if (comps.size() > 1)
    throw GraphError("graph is disconnected: nodes " + std::to_string(comps[0][0]) + " and " +
                     std::to_string(comps[1][0]) + " are not connected");
}

/// All-pairs shortest-path distances of a connected graph.
inline DistanceMatrix shortest_path_distances(const Graph& g,
                                              DistanceMode mode = DistanceMode::Weighted) {
  require_connected(g);
  const std::size_t n = g.node_count();
  DistanceMatrix d(n);
  parallel_for(
      n,
      [&](std::size_t s) {
        const auto row = single_source_distances(g, static_cast<NodeId>(s), mode);
        std::copy(row.begin(), row.end(), d.row(s).begin());
      },
      16);
  return d;
}

/// Largest shortest-path distance. Exact up to kExactDiameterLimit nodes; above
/// that a double-sweep lower bound (farthest node from 0, then farthest from it).
inline constexpr std::size_t kExactDiameterLimit = 2048;

inline double graph_diameter(const Graph& g, DistanceMode mode = DistanceMode::Weighted) {
  require_connected(g);
  const std::size_t n = g.node_count();
  if (n <= 1) return 0.0;
  auto eccentricity = [&](NodeId s, NodeId* far) {
    const auto dist = single_source_distances(g, s, mode);
    const auto it = std::max_element(dist.begin(), dist.end());
    if (far) *far = static_cast<NodeId>(it - dist.begin());
    return *it;
  };
  if (n <= kExactDiameterLimit) {
    std::vector<double> ecc(n);
    parallel_for(n, [&](std::size_t s) { ecc[s] = eccentricity(static_cast<NodeId>(s), nullptr); }, 16);
    return *std::max_element(ecc.begin(), ecc.end());
  }
  NodeId far = 0;
  eccentricity(0, &far);
  return eccentricity(far, nullptr);
}

/// Subgraph induced by `nodes`; local id i corresponds to nodes[i].
inline Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> local(g.node_count(), std::numeric_limits<NodeId>::max());
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  std::vector<Edge> edges;
  std::vector<double> weights;
  weights.reserve(nodes.size());
  for (NodeId v : nodes) weights.push_back(g.node_weight(v));
  for (const auto& e : g.edges())
    if (local[e.u] != std::numeric_limits<NodeId>::max() &&
        local[e.v] != std::numeric_limits<NodeId>::max())
      edges.push_back({local[e.u], local[e.v], e.weight});
  return Graph(nodes.size(), edges, std::move(weights));
}

/// Graph obtained by merging every group of `part_of` into one node: node
/// weights and crossing edge weights are summed, intra-part edges vanish.
inline Graph quotient_graph(const Graph& g, std::span<const NodeId> part_of, std::size_t part_count) {
  std::vector<double> weights(part_count, 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) weights[part_of[v]] += g.node_weight(v);
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges())
    if (part_of[e.u] != part_of[e.v]) edges.push_back({part_of[e.u], part_of[e.v], e.weight});
  return Graph(part_count, edges, std::move(weights));
}

}  // namespace fzlayout
