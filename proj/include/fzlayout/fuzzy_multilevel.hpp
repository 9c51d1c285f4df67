#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fzlayout/errors.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/multilevel.hpp"
#include "fzlayout/optimizer.hpp"
#include "fzlayout/parallel.hpp"
#include "fzlayout/partition_multilevel.hpp"
#include "fzlayout/refinement.hpp"

namespace fzlayout {

/// c x N membership matrix stored by column. Column k lists the parts node k
/// belongs to, sorted by part, with nonzero degrees.
class PartitionMatrix {
public:
  struct Entry {
    NodeId part;
    double value;
  };

  PartitionMatrix() = default;
  PartitionMatrix(std::size_t parts, std::vector<std::vector<Entry>> columns)
      : parts_(parts), columns_(std::move(columns)) {
    for (const auto& col : columns_)
      for (const auto& e : col)
        if (e.part >= parts_) throw ValidationError("membership entry names part " + std::to_string(e.part));
  }

  static PartitionMatrix crisp(const Partition& p) {
    std::vector<std::vector<Entry>> cols(p.part_of.size());
    for (std::size_t k = 0; k < cols.size(); ++k) cols[k] = {{p.part_of[k], 1.0}};
    return PartitionMatrix(p.part_count, std::move(cols));
  }

  static PartitionMatrix identity(std::size_t n) {
    std::vector<std::vector<Entry>> cols(n);
    for (std::size_t k = 0; k < n; ++k) cols[k] = {{static_cast<NodeId>(k), 1.0}};
    return PartitionMatrix(n, std::move(cols));
  }

  std::size_t parts() const noexcept { return parts_; }
  std::size_t nodes() const noexcept { return columns_.size(); }
  const std::vector<Entry>& column(std::size_t k) const { return columns_[k]; }

  double operator()(std::size_t part, std::size_t node) const {
    for (const auto& e : columns_[node])
      if (e.part == part) return e.value;
    return 0.0;
  }

  std::vector<double> row_sums() const {
    std::vector<double> s(parts_, 0.0);
    for (const auto& col : columns_)
      for (const auto& e : col) s[e.part] += e.value;
    return s;
  }

  bool is_crisp() const {
    for (const auto& col : columns_)
      if (col.size() != 1 || col.front().value != 1.0) return false;
    return true;
  }

  std::vector<MembershipEntry> triplets() const {
    std::vector<MembershipEntry> out;
    for (std::size_t k = 0; k < columns_.size(); ++k)
      for (const auto& e : columns_[k]) out.push_back({e.part, static_cast<NodeId>(k), e.value});
    std::sort(out.begin(), out.end(), [](const MembershipEntry& a, const MembershipEntry& b) {
      return a.part != b.part ? a.part < b.part : a.node < b.node;
    });
    return out;
  }

private:
  std::size_t parts_ = 0;
  std::vector<std::vector<Entry>> columns_;
};

struct MatrixViolation {
  enum class Kind { EntryRange, ColumnSum, RowSum };
  Kind kind;
  std::size_t part = 0;  // row; unused for column sums
  std::size_t node = 0;  // column; unused for row sums
  double value = 0.0;

  std::string describe() const {
    switch (kind) {
      case Kind::EntryRange:
        return "entry (" + std::to_string(part) + "," + std::to_string(node) + ") = " + std::to_string(value) +
               " outside [0,1]";
      case Kind::ColumnSum:
        return "column " + std::to_string(node) + " sums to " + std::to_string(value);
      case Kind::RowSum:
        return "row " + std::to_string(part) + " sums to " + std::to_string(value) + ", outside (0,N)";
    }
    return {};
  }
};

inline constexpr double kColumnSumTolerance = 1e-9;

/// First violated membership condition, checked entries, then columns, then rows.
inline std::optional<MatrixViolation> validate_partition_matrix(const PartitionMatrix& U) {
  for (std::size_t k = 0; k < U.nodes(); ++k)
    for (const auto& e : U.column(k))
      if (!(e.value >= 0.0 && e.value <= 1.0))
        return MatrixViolation{MatrixViolation::Kind::EntryRange, e.part, k, e.value};
  for (std::size_t k = 0; k < U.nodes(); ++k) {
    double sum = 0.0;
    for (const auto& e : U.column(k)) sum += e.value;
    if (!(std::abs(sum - 1.0) <= kColumnSumTolerance))
      return MatrixViolation{MatrixViolation::Kind::ColumnSum, 0, k, sum};
  }
  const auto rows = U.row_sums();
  const double N = static_cast<double>(U.nodes());
  for (std::size_t p = 0; p < rows.size(); ++p)
    if (!(rows[p] > 0.0 && rows[p] < N)) return MatrixViolation{MatrixViolation::Kind::RowSum, p, 0, rows[p]};
  return std::nullopt;
}

inline constexpr double kAffinityPruneLevel = 1e-3;

/// Memberships for a given center set. Centers belong only to their own part.
/// Any other node's affinity to a center is the probability mass that random
/// walks of 1..hop_limit steps from the node (with edge-weight-proportional
/// moves) put on that center. Affinities below 1e-3 are dropped; a node with
/// none left goes wholly to its nearest center.
inline PartitionMatrix fuzzy_partition_from_centers(const Graph& g, std::vector<NodeId> centers, int hop_limit) {
  if (hop_limit < 1) throw ConfigError("fuzzy hop limit must be at least 1");
  const Partition nearest = partition_from_centers(g, centers);
  std::sort(centers.begin(), centers.end());
  const std::size_t n = g.node_count();
  std::vector<NodeId> center_part(n, static_cast<NodeId>(-1));
  for (NodeId p = 0; p < centers.size(); ++p) center_part[centers[p]] = p;
  std::vector<double> strength(n, 0.0);
  for (NodeId v = 0; v < n; ++v)
    for (const auto& nb : g.neighbors(v)) strength[v] += nb.weight;

  std::vector<std::vector<PartitionMatrix::Entry>> cols(n);
  parallel_for(n, [&](std::size_t k) {
    if (center_part[k] != static_cast<NodeId>(-1)) {
      cols[k] = {{center_part[k], 1.0}};
      return;
    }
    std::map<NodeId, double> walk{{static_cast<NodeId>(k), 1.0}};
    std::map<NodeId, double> affinity;
    for (int step = 1; step <= hop_limit; ++step) {
      std::map<NodeId, double> next;
      for (const auto& [u, mass] : walk) {
        if (!(strength[u] > 0.0)) continue;
        for (const auto& nb : g.neighbors(u)) next[nb.node] += mass * nb.weight / strength[u];
      }
      walk = std::move(next);
      for (const auto& [u, mass] : walk)
        if (center_part[u] != static_cast<NodeId>(-1)) affinity[center_part[u]] += mass;
    }
    double total = 0.0;
    for (const auto& [p, a] : affinity)
      if (a >= kAffinityPruneLevel) total += a;
    if (!(total > 0.0)) {
      cols[k] = {{nearest.part_of[k], 1.0}};
      return;
    }
    for (const auto& [p, a] : affinity)
      if (a >= kAffinityPruneLevel) cols[k].push_back({p, a / total});
  }, 16);
  return PartitionMatrix(centers.size(), std::move(cols));
}

/// Memberships with c centers picked by the seeded farthest-first rule. Needs
/// 2 <= c <= N: a single part would hold every node fully, which the strict
/// row-sum bound rules out.
inline PartitionMatrix fuzzy_partition(const Graph& g, std::size_t c, std::uint64_t seed, int hop_limit = 2) {
  const std::size_t n = g.node_count();
  if (c < 2 || c > n)
    throw ValidationError("fuzzy part count " + std::to_string(c) + " outside 2.." + std::to_string(n));
  Rng rng(seed);
  return fuzzy_partition_from_centers(g, k_centers(g, c, static_cast<NodeId>(rng.index(n))), hop_limit);
}

struct CoarseGraph {
  Graph graph;
  double diagonal_mass = 0.0;   // fine edge weight that fell inside single parts
  double total_before_pruning = 0.0;
  double pruned_weight = 0.0;
  std::size_t pruned_edges = 0;
};

/// W_coarse = U W U^T without the diagonal. Node weights are U times the fine
/// node weights. For non-crisp U, edges lighter than tau_fraction times the
/// heaviest coarse edge are dropped, except that the heaviest dropped edges
/// come back if the pruned graph would otherwise fall apart.
inline CoarseGraph build_coarse_graph(const Graph& fine, const PartitionMatrix& U, double tau_fraction = 1e-3) {
  if (U.nodes() != fine.node_count())
    throw ValidationError("membership matrix has " + std::to_string(U.nodes()) + " columns for " +
                          std::to_string(fine.node_count()) + " nodes");
  if (!(tau_fraction >= 0.0)) throw ConfigError("prune fraction must be nonnegative");
  const std::size_t c = U.parts();
  std::vector<double> weights(c, 0.0);
  for (std::size_t k = 0; k < fine.node_count(); ++k)
    for (const auto& e : U.column(k)) weights[e.part] += fine.node_weight(static_cast<NodeId>(k)) * e.value;

  CoarseGraph out;
  std::map<std::pair<NodeId, NodeId>, double> merged;
  for (const auto& edge : fine.edges())
    for (const auto& a : U.column(edge.u))
      for (const auto& b : U.column(edge.v)) {
        const double term = a.value * edge.weight * b.value;
        if (a.part == b.part)
          out.diagonal_mass += term;
        else
          merged[std::minmax(a.part, b.part)] += term;
      }

  std::vector<Edge> kept;
  std::vector<Edge> dropped;
  double heaviest = 0.0;
  for (const auto& [key, w] : merged) {
    heaviest = std::max(heaviest, w);
    out.total_before_pruning += w;
  }
  const double tau = U.is_crisp() ? 0.0 : tau_fraction * heaviest;
  for (const auto& [key, w] : merged) {
    if (w < tau)
      dropped.push_back({key.first, key.second, w});
    else
      kept.push_back({key.first, key.second, w});
  }
  if (!dropped.empty()) {
    Graph unpruned(c, [&] {
      std::vector<Edge> all = kept;
      all.insert(all.end(), dropped.begin(), dropped.end());
      return all;
    }(), weights);
    const std::size_t want = connected_components(unpruned).size();
    if (connected_components(Graph(c, kept, weights)).size() > want) {
      std::stable_sort(dropped.begin(), dropped.end(), [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
      std::vector<NodeId> root(c);
      std::iota(root.begin(), root.end(), 0);
      auto find = [&](NodeId v) {
        while (root[v] != v) v = root[v] = root[root[v]];
        return v;
      };
      for (const auto& e : kept) root[find(e.u)] = find(e.v);
      std::vector<Edge> still_dropped;
      for (const auto& e : dropped) {
        const NodeId a = find(e.u);
        const NodeId b = find(e.v);
        if (a != b) {
          root[a] = b;
          kept.push_back(e);
        } else {
          still_dropped.push_back(e);
        }
      }
      dropped = std::move(still_dropped);
    }
  }
  for (const auto& e : dropped) out.pruned_weight += e.weight;
  out.pruned_edges = dropped.size();
  out.graph = Graph(c, kept, std::move(weights));
  return out;
}

/// Fine positions as U^T times the coarse positions.
inline Layout fuzzy_interpolate(const PartitionMatrix& U, const Layout& coarse_layout) {
  if (coarse_layout.size() != U.parts())
    throw ValidationError("coarse layout has " + std::to_string(coarse_layout.size()) + " positions for " +
                          std::to_string(U.parts()) + " parts");
  Layout x(U.nodes());
  for (std::size_t k = 0; k < U.nodes(); ++k) {
    Vec2 p{};
    for (const auto& e : U.column(k)) p += e.value * coarse_layout[e.part];
    x[k] = p;
  }
  return x;
}

/// Interpolates, separates coincident nodes, then runs clipped passes with
/// every node confined to a circle around its start whose radius is half the
/// smallest distance between coarse positions.
inline Layout fuzzy_refine_local(const Graph& fine, const DistanceMatrix& d, const PartitionMatrix& U,
                                 const Layout& coarse_layout, const MultilevelSettings& s, std::uint64_t seed,
                                 PipelineResult& out) {
  const double K = s.force.K;
  Layout x = fuzzy_interpolate(U, coarse_layout);
  separate_coincident(x, K, seed);
  double radius = coarse_layout.size() < 2 ? K : 0.5 * min_pairwise_distance(coarse_layout);
  if (!(radius > 0.0)) radius = 0.5e-2 * K;
  std::vector<Circle> area(x.size());
  for (std::size_t v = 0; v < x.size(); ++v) area[v] = {x[v], radius};
  constrained_passes(fine, d, x, area, s, out);
  return x;
}

/// Fuzzy pipeline: halve with c = ceil(N/2) parts per level, lay out the
/// coarsest level at random, then interpolate, polish locally and refine.
inline PipelineResult fuzzy_multilevel_layout(const Graph& g, const MultilevelSettings& s) {
  s.force.validate();
  s.optimizer.validate();
  require_connected(g);
  const double K = s.force.K;
  std::vector<Graph> graphs{g};
  std::vector<PartitionMatrix> memberships;
  while (graphs.back().node_count() >= s.threshold) {
    const Graph& cur = graphs.back();
    const std::size_t c = (cur.node_count() + 1) / 2;
    if (c < 2) break;
    const std::uint64_t tag = 16 * (memberships.size() + 1) + 1;
    PartitionMatrix U = fuzzy_partition(cur, c, derive_seed(s.seed, tag), s.fuzzy_hop_limit);
    Graph coarse = build_coarse_graph(cur, U, s.fuzzy_prune_tau).graph;
    memberships.push_back(std::move(U));
    graphs.push_back(std::move(coarse));
  }

  PipelineResult out;
  const std::size_t L = memberships.size();
  Layout x = random_layout(graphs[L].node_count(), K, derive_seed(s.seed, 16 * L));
  x = refine_level(graphs[L], level_distances(graphs[L], L == 0, s), std::move(x), s, out);
  for (std::size_t i = L; i-- > 0;) {
    const DistanceMatrix d = level_distances(graphs[i], i == 0, s);
    Layout local = fuzzy_refine_local(graphs[i], d, memberships[i], x, s, derive_seed(s.seed, 16 * i + 2), out);
    x = refine_level(graphs[i], d, std::move(local), s, out);
  }
  out.layout = std::move(x);
  out.levels.assign(graphs.begin() + 1, graphs.end());
  for (const auto& U : memberships) out.memberships.push_back(U.triplets());
  return out;
}

}  // namespace fzlayout
