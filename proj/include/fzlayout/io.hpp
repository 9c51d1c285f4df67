#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "fzlayout/edge_list.hpp"
#include "fzlayout/errors.hpp"
#include "fzlayout/force_models.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/optimizer.hpp"
#include "fzlayout/refinement.hpp"

namespace fzlayout {

/// Quality report for a finished layout. Values that are undefined for the
/// input (no edges, all nodes coincident, a single node) are left empty.
struct LayoutMetrics {
  std::optional<double> stress;
  std::optional<double> normalized_stress;
  std::optional<double> linlog;
  std::optional<double> binary_stress;
  std::optional<double> residual;
  std::optional<double> edge_length_mean;
  std::optional<double> edge_length_variance;
};

/// Distance-based metrics are summed over connected components, so pairs in
/// different components never contribute.
inline LayoutMetrics compute_metrics(const Graph& g, const Layout& x, const ForceConfig& cfg,
                                     DistanceMode mode = DistanceMode::Weighted) {
  LayoutMetrics m;
  const std::size_t n = g.node_count();
  if (n == 0) return m;

  double stress = 0.0;
  StressSums sums;
  for (const auto& comp : connected_components(g)) {
    if (comp.size() < 2) continue;
    const Graph sub = induced_subgraph(g, comp);
    Layout xs;
    for (NodeId v : comp) xs.push_back(x[v]);
    const auto d = shortest_path_distances(sub, mode);
    stress += stress_energy(sub, d, xs, cfg);
    sums += stress_sums(sub, d, xs, cfg);
  }
  if (n >= 2) {
    m.stress = stress;
    m.normalized_stress = normalized_stress(sums);
    m.residual = equilibrium_residual(sums);
    m.binary_stress = binary_stress_energy(g, x, cfg);
    try {
      m.linlog = linlog_energy(g, x);
    } catch (const ValidationError&) {
    }
  }

  if (g.edge_count() > 0) {
    double sum = 0.0;
    for (const auto& e : g.edges()) sum += norm(x[e.u] - x[e.v]);
    const double mean = sum / static_cast<double>(g.edge_count());
    double var = 0.0;
    for (const auto& e : g.edges()) {
      const double dev = norm(x[e.u] - x[e.v]) - mean;
      var += dev * dev;
    }
    m.edge_length_mean = mean;
    m.edge_length_variance = var / static_cast<double>(g.edge_count());
  }
  return m;
}

/// Places component layouts side by side in rows, tallest first, with a gap
/// of K between boxes. Rows are capped near the square root of the total box
/// area. components[c] lists the node ids whose positions are in parts[c].
inline Layout shelf_pack(std::size_t n, const std::vector<std::vector<NodeId>>& components,
                         const std::vector<Layout>& parts, double K) {
  const std::size_t c = components.size();
  std::vector<BoundingBox> box(c);
  double area = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    box[i] = bounding_box(parts[i]);
    area += (box[i].width() + K) * (box[i].height() + K);
  }
  std::vector<std::size_t> order(c);
  for (std::size_t i = 0; i < c; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return box[a].height() > box[b].height(); });
  double row_limit = std::sqrt(area);
  for (std::size_t i = 0; i < c; ++i) row_limit = std::max(row_limit, box[i].width());

  Layout x(n);
  double cursor_x = 0.0;
  double cursor_y = 0.0;
  double row_height = 0.0;
  for (std::size_t i : order) {
    if (cursor_x > 0.0 && cursor_x + box[i].width() > row_limit) {
      cursor_x = 0.0;
      cursor_y += row_height + K;
      row_height = 0.0;
    }
    const Vec2 shift{cursor_x - box[i].min.x, cursor_y - box[i].min.y};
    for (std::size_t k = 0; k < components[i].size(); ++k) x[components[i][k]] = parts[i][k] + shift;
    cursor_x += box[i].width() + K;
    row_height = std::max(row_height, box[i].height());
  }
  return x;
}

namespace detail {

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string json_real(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

inline std::string json_optional(const std::optional<double>& v) { return v ? json_real(*v) : "null"; }

}  // namespace detail

/// Extra top-level fields for the JSON document, emitted in the given order.
struct JsonExtras {
  std::string pipeline = "none";
  long total_iterations = 0;
};

/// Layout document with reals at 17 significant digits. Node order is the
/// dense id order, so the array position is the id mapping.
inline std::string layout_to_json(const Graph& g, const std::vector<std::string>& labels, const Layout& x,
                                  const LayoutMetrics& m, std::uint64_t seed, const JsonExtras& extra = {}) {
  auto label = [&](NodeId v) { return labels.empty() ? std::to_string(v) : labels[v]; };
  std::string out = "{\"nodes\":[";
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (v) out += ',';
    out += "{\"id\":" + detail::json_string(label(v)) + ",\"x\":" + detail::json_real(x[v].x) +
           ",\"y\":" + detail::json_real(x[v].y) + '}';
  }
  out += "],\"edges\":[";
  bool first = true;
  for (const auto& e : g.edges()) {
    if (!first) out += ',';
    first = false;
    out += "{\"u\":" + detail::json_string(label(e.u)) + ",\"v\":" + detail::json_string(label(e.v)) +
           ",\"w\":" + detail::json_real(e.weight) + '}';
  }
  out += "],\"metrics\":{";
  out += "\"stress\":" + detail::json_optional(m.stress);
  out += ",\"normalized_stress\":" + detail::json_optional(m.normalized_stress);
  out += ",\"linlog\":" + detail::json_optional(m.linlog);
  out += ",\"binary_stress\":" + detail::json_optional(m.binary_stress);
  out += ",\"residual\":" + detail::json_optional(m.residual);
  out += ",\"edge_length_mean\":" + detail::json_optional(m.edge_length_mean);
  out += ",\"edge_length_variance\":" + detail::json_optional(m.edge_length_variance);
  out += "},\"pipeline\":" + detail::json_string(extra.pipeline);
  out += ",\"iterations\":" + std::to_string(extra.total_iterations);
  out += ",\"seed\":" + std::to_string(seed) + "}\n";
  return out;
}

/// Reads node positions from a layout document, matching records to labels
/// by id. Every label must appear exactly once.
inline Layout layout_from_json(const std::string& text, const std::vector<std::string>& labels) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("layout JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
    throw ValidationError("layout JSON has no \"nodes\" array");
  std::unordered_map<std::string, NodeId> index;
  for (NodeId v = 0; v < labels.size(); ++v) index.emplace(labels[v], v);
  Layout x(labels.size());
  std::vector<bool> seen(labels.size(), false);
  for (const auto& rec : doc["nodes"]) {
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("x") || !rec.contains("y") ||
        !rec["x"].is_number() || !rec["y"].is_number())
      throw ValidationError("layout JSON node record needs id, x and y");
    const std::string id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
    const auto it = index.find(id);
    if (it == index.end()) throw ValidationError("layout JSON names unknown node '" + id + "'");
    if (seen[it->second]) throw ValidationError("layout JSON repeats node '" + id + "'");
    seen[it->second] = true;
    x[it->second] = {rec["x"].get<double>(), rec["y"].get<double>()};
  }
  for (NodeId v = 0; v < labels.size(); ++v)
    if (!seen[v]) throw ValidationError("layout JSON has no position for node '" + labels[v] + "'");
  return x;
}

inline constexpr double kViewBox = 1000.0;

/// Layout fitted into a kViewBox square with a 5% margin, aspect preserved.
/// Edges are drawn first in (u, v) order, then nodes in id order.
inline std::string layout_to_svg(const Graph& g, const Layout& x) {
  const double margin = 0.05 * kViewBox;
  const double inner = kViewBox - 2.0 * margin;
  const BoundingBox box = bounding_box(x);
  const double extent = std::max(box.width(), box.height());
  const double scale = extent > 0.0 ? inner / extent : 0.0;
  const Vec2 mid{0.5 * (box.min.x + box.max.x), 0.5 * (box.min.y + box.max.y)};
  auto map = [&](Vec2 p) {
    // SVG y grows downwards.
    return Vec2{0.5 * kViewBox + scale * (p.x - mid.x), 0.5 * kViewBox - scale * (p.y - mid.y)};
  };
  char buf[160];
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %g %g\" width=\"%g\" height=\"%g\">\n",
                kViewBox, kViewBox, kViewBox, kViewBox);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<g stroke=\"#555555\" stroke-width=\"1\">\n";
  for (const auto& e : g.edges()) {
    const Vec2 a = map(x[e.u]);
    const Vec2 b = map(x[e.v]);
    std::snprintf(buf, sizeof buf, "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", a.x, a.y, b.x, b.y);
    out += buf;
  }
  out += "</g>\n<g fill=\"#1f5fa8\">\n";
  const double r = 0.004 * kViewBox;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const Vec2 p = map(x[v]);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%g\"/>\n", p.x, p.y, r);
    out += buf;
  }
  out += "</g>\n</svg>\n";
  return out;
}

/// One `iteration,phase,energy,temperature` row per entry, prefixed by the
/// component index.
inline std::string trace_to_csv(const std::vector<std::vector<TraceEntry>>& traces) {
  std::string out = "component,iteration,phase,energy,temperature\n";
  for (std::size_t c = 0; c < traces.size(); ++c)
    for (const auto& t : traces[c])
      out += std::to_string(c) + ',' + std::to_string(t.iteration) + ',' +
             (t.phase == Phase::SteepestDescent ? "sd" : "cg") + ',' + detail::format_real(t.energy) + ',' +
             detail::format_real(t.temperature) + '\n';
  return out;
}

/// Sparse membership matrix as `row col value` lines (part, node, value).
inline std::string memberships_to_triplets(const std::vector<MembershipEntry>& entries) {
  std::string out;
  for (const auto& e : entries)
    out += std::to_string(e.part) + ' ' + std::to_string(e.node) + ' ' + detail::format_real(e.value) + '\n';
  return out;
}

}  // namespace fzlayout
