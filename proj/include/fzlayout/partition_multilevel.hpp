#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fzlayout/errors.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/multilevel.hpp"
#include "fzlayout/optimizer.hpp"
#include "fzlayout/random.hpp"
#include "fzlayout/refinement.hpp"

namespace fzlayout {

struct Partition {
  std::vector<NodeId> part_of;
  std::size_t part_count = 0;
  std::vector<NodeId> centers;  // part p is centered at centers[p]; ascending
};

/// Farthest-first center selection on hop distances, starting from `first`.
/// Ties go to the lower node id. Returns centers in selection order.
inline std::vector<NodeId> k_centers(const Graph& g, std::size_t k, NodeId first) {
  const std::size_t n = g.node_count();
  if (k < 1 || k > n)
    throw ValidationError("center count " + std::to_string(k) + " outside 1.." + std::to_string(n));
  if (first >= n) throw ValidationError("first center " + std::to_string(first) + " is not a node");
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<NodeId> centers;
  NodeId next = first;
  while (true) {
    centers.push_back(next);
    const auto dist = single_source_distances(g, next, DistanceMode::Hops);
    for (std::size_t v = 0; v < n; ++v) nearest[v] = std::min(nearest[v], dist[v]);
    if (centers.size() == k) break;
    double far = -1.0;
    for (NodeId v = 0; v < n; ++v)
      if (nearest[v] > far) {
        far = nearest[v];
        next = v;
      }
  }
  return centers;
}

/// Every node joins its nearest center by hops, ties to the lower center id.
/// Parts are numbered by ascending center id.
inline Partition partition_from_centers(const Graph& g, std::vector<NodeId> centers) {
  std::sort(centers.begin(), centers.end());
  const std::size_t n = g.node_count();
  Partition p;
  p.part_count = centers.size();
  p.part_of.assign(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (NodeId c = 0; c < centers.size(); ++c) {
    const auto dist = single_source_distances(g, centers[c], DistanceMode::Hops);
    for (std::size_t v = 0; v < n; ++v)
      if (dist[v] < best[v]) {
        best[v] = dist[v];
        p.part_of[v] = c;
      }
  }
  p.centers = std::move(centers);
  return p;
}

inline Partition k_centers_partition_from(const Graph& g, std::size_t k, NodeId first) {
  return partition_from_centers(g, k_centers(g, k, first));
}

/// The first center is drawn uniformly with the seed.
inline Partition k_centers_partition(const Graph& g, std::size_t k, std::uint64_t seed) {
  if (g.node_count() == 0) throw ValidationError("cannot partition an empty graph");
  Rng rng(seed);
  return k_centers_partition_from(g, k, static_cast<NodeId>(rng.index(g.node_count())));
}

struct PartitionLevel {
  Graph graph;
  Partition partition;
};

/// Contracts each part of a k-centers partition of the base graph.
inline PartitionLevel coarsen_by_partition(const Graph& base, std::size_t target, std::uint64_t seed) {
  if (target < 1) throw ValidationError("partition target must be at least 1");
  Partition p = k_centers_partition(base, target, seed);
  Graph coarse = quotient_graph(base, p.part_of, p.part_count);
  return {std::move(coarse), std::move(p)};
}

/// Base-graph layout from a coarse layout: members of part p start uniformly
/// in the circle around the part's position with radius half the distance
/// to the nearest other part, then polish with clipped passes.
inline Layout expand_via_base(const Graph& base, const DistanceMatrix& d, const Partition& partition,
                              const Layout& coarse_layout, const MultilevelSettings& s, std::uint64_t seed,
                              PipelineResult& out) {
  const std::size_t c = partition.part_count;
  if (coarse_layout.size() != c)
    throw ValidationError("coarse layout has " + std::to_string(coarse_layout.size()) + " positions for " +
                          std::to_string(c) + " parts");
  const double K = s.force.K;
  Layout centers = coarse_layout;
  separate_coincident(centers, K, derive_seed(seed, 1));

  std::vector<std::size_t> size(c, 0);
  for (NodeId part : partition.part_of) ++size[part];
  std::vector<double> radius(c, 0.0);
  if (c == 1) {
    radius[0] = K * std::sqrt(static_cast<double>(size[0]));
  } else {
    for (std::size_t p = 0; p < c; ++p) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < c; ++q)
        if (q != p) nearest = std::min(nearest, norm(centers[p] - centers[q]));
      radius[p] = 0.5 * nearest;
    }
  }

  Rng rng(seed);
  Layout x(base.node_count());
  std::vector<Circle> area(base.node_count());
  for (NodeId v = 0; v < base.node_count(); ++v) {
    const NodeId p = partition.part_of[v];
    if (size[p] == 1) {
      x[v] = centers[p];
      area[v] = {centers[p], 0.0};
    } else {
      area[v] = {centers[p], radius[p]};
      x[v] = clip_to_circle(area[v], rng.in_disk(centers[p], radius[p]));
    }
  }
  constrained_passes(base, d, x, area, s, out);
  return x;
}

/// Each part's position is the node-weighted centroid of its base nodes.
inline Layout project_to_level(const Graph& base, const Layout& base_layout, const Partition& partition) {
  std::vector<Vec2> sum(partition.part_count);
  std::vector<double> mass(partition.part_count, 0.0);
  for (NodeId v = 0; v < base.node_count(); ++v) {
    const NodeId p = partition.part_of[v];
    sum[p] += base.node_weight(v) * base_layout[v];
    mass[p] += base.node_weight(v);
  }
  Layout x(partition.part_count);
  for (std::size_t p = 0; p < partition.part_count; ++p) x[p] = (1.0 / mass[p]) * sum[p];
  return x;
}

/// Partition-based multilevel layout. Level i is a k-centers contraction of the base graph to
/// ceil(n / 2^i) parts, each with its own seed; refinement goes
/// coarse layout -> base layout -> next level's centroids.
inline PipelineResult partition_multilevel_layout(const Graph& g, const MultilevelSettings& s) {
  s.force.validate();
  s.optimizer.validate();
  require_connected(g);
  const std::size_t n = g.node_count();
  const double K = s.force.K;
  std::vector<PartitionLevel> levels;
  std::size_t current = n;
  for (std::size_t i = 1; current >= s.threshold && i < 64; ++i) {
    const std::size_t target = (n + (std::size_t{1} << i) - 1) >> i;
    if (target >= current || target < 1) break;
    levels.push_back(coarsen_by_partition(g, target, derive_seed(s.seed, 16 * i + 1)));
    current = target;
  }

  PipelineResult out;
  const DistanceMatrix d_base = level_distances(g, true, s);
  const std::size_t L = levels.size();
  if (L == 0) {
    out.layout = refine_level(g, d_base, random_layout(n, K, derive_seed(s.seed, 0)), s, out);
    return out;
  }
  const Graph& coarsest = levels[L - 1].graph;
  Layout x = random_layout(coarsest.node_count(), K, derive_seed(s.seed, 16 * L));
  x = refine_level(coarsest, level_distances(coarsest, false, s), std::move(x), s, out);
  for (std::size_t i = L; i-- > 0;) {
    Layout base_x = expand_via_base(g, d_base, levels[i].partition, x, s, derive_seed(s.seed, 16 * i + 2), out);
    if (i == 0) {
      x = refine_level(g, d_base, std::move(base_x), s, out);
    } else {
      const Graph& level = levels[i - 1].graph;
      x = refine_level(level, level_distances(level, false, s),
                       project_to_level(g, base_x, levels[i - 1].partition), s, out);
    }
  }
  out.layout = std::move(x);
  for (auto& level : levels) out.levels.push_back(level.graph);
  return out;
}

}  // namespace fzlayout
