#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fzlayout/errors.hpp"
#include "fzlayout/graph.hpp"

namespace fzlayout {

/// A graph together with the original node tokens (labels[i] names node i).
struct LabeledGraph {
  Graph graph;
  std::vector<std::string> labels;
};

namespace detail {

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace detail

/// Parses the whitespace-separated `u v [w]` edge-list format. `#` starts a
/// comment running to end of line. Tokens are mapped to dense ids in order of
/// first appearance; a self-loop line still registers its node.
inline LabeledGraph load_graph(std::string_view text) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view token) {
    auto [it, inserted] = ids.try_emplace(std::string(token), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(token);
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = detail::split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2 && tokens.size() != 3)
      throw ParseError(line_no, "expected 'u v' or 'u v w', got " + std::to_string(tokens.size()) +
                                    " fields");
    double weight = 1.0;
    if (tokens.size() == 3) {
      const auto w = tokens[2];
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
      if (ec != std::errc{} || ptr != w.data() + w.size())
        throw ParseError(line_no, "invalid weight '" + std::string(w) + "'");
      if (!(weight > 0.0) || !std::isfinite(weight))
        throw ValidationError("line " + std::to_string(line_no) + ": edge weight must be positive, got " +
                              std::string(w));
    }
    const NodeId u = intern(tokens[0]);
    const NodeId v = intern(tokens[1]);
    edges.push_back({u, v, weight});
  }
  return {Graph(labels.size(), edges), std::move(labels)};
}

inline LabeledGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return load_graph(buf.str());
}

/// Writes g as an edge list that load_graph maps back to the same ids. Nodes
/// that would otherwise be first seen out of id order, or not at all, are
/// declared with a self-loop line. Node weights are not representable.
inline std::string serialize_edge_list(const Graph& g, const std::vector<std::string>& labels = {}) {
  auto name = [&](NodeId v) { return labels.empty() ? std::to_string(v) : labels[v]; };
  std::string out;
  NodeId next = 0;
  auto declare_below = [&](NodeId v) {
    for (; next < v; ++next) out += name(next) + ' ' + name(next) + '\n';
  };
  for (const auto& e : g.edges()) {
    // Ids below `next` are registered by lines already written.
    bool u_pending = false;
    if (e.u >= next) {
      declare_below(e.u);
      next = e.u + 1;
      u_pending = true;
    }
    if (e.v >= next) {
      if (e.v > next && u_pending) out += name(e.u) + ' ' + name(e.u) + '\n';
      declare_below(e.v);
      next = e.v + 1;
    }
    out += name(e.u) + ' ' + name(e.v);
    if (e.weight != 1.0) out += ' ' + detail::format_real(e.weight);
    out += '\n';
  }
  for (; next < g.node_count(); ++next) out += name(next) + ' ' + name(next) + '\n';
  return out;
}

}  // namespace fzlayout
