#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fzlayout/edge_list.hpp"
#include "fzlayout/errors.hpp"
#include "fzlayout/io.hpp"
#include "fzlayout/pipeline.hpp"

namespace fzlayout {

enum class OutputFormat { Svg, Json, Both };

struct RunConfig {
  std::string input;
  std::optional<std::string> init_layout;
  std::string model = "stress";  // comma-separated rule[:weight]
  double K = 1.0;
  double omega_exponent = 2.0;
  double binary_alpha = 1.0;
  bool hops = false;
  std::string pipeline = "none";
  long iterations = 300;
  double phase_split = 0.5;
  double cooling = 0.9;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::optional<std::string> output;  // path prefix; stdout when absent
  std::optional<std::string> trace;
  std::optional<std::string> dump_levels;
  std::size_t threshold = 10;
  std::string match = "heavy";
  std::string rescale = "avg";
  int fuzzy_hop_limit = 2;
  double fuzzy_prune_tau = 1e-3;
  int constrained_passes = 20;
};

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitConfig = 3, kExitNumeric = 4 };

/// Parses `stress`, `spring,repulsion:0.5` and the like into the enabled rule set.
inline ForceConfig parse_model(const std::string& text) {
  ForceConfig cfg;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    double weight = 1.0;
    std::string name = item;
    if (const auto colon = item.find(':'); colon != std::string::npos) {
      name = item.substr(0, colon);
      const std::string w = item.substr(colon + 1);
      const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), weight);
      if (ec != std::errc{} || ptr != w.data() + w.size())
        throw ConfigError("invalid weight '" + w + "' for rule " + name);
    }
    const auto rule = parse_rule(name);
    if (!rule) throw ConfigError("unknown force rule '" + name + "'");
    cfg.enable(*rule, weight);
  }
  return cfg;
}

struct ResolvedConfig {
  MultilevelSettings settings;
  PipelineKind pipeline = PipelineKind::None;
  OutputFormat format = OutputFormat::Json;
};

/// Everything that can be rejected without reading the input.
inline ResolvedConfig resolve_config(const RunConfig& rc) {
  ResolvedConfig r;
  MultilevelSettings& s = r.settings;
  s.force = parse_model(rc.model);
  s.force.K = rc.K;
  s.force.omega_exponent = rc.omega_exponent;
  s.force.binary_alpha = rc.binary_alpha;
  s.force.validate();
  s.optimizer.max_iterations = rc.iterations;
  s.optimizer.phase_split = rc.phase_split;
  s.optimizer.cooling = rc.cooling;
  s.optimizer.validate();
  s.seed = rc.seed;
  s.distance_mode = rc.hops ? DistanceMode::Hops : DistanceMode::Weighted;
  s.threshold = rc.threshold;
  if (rc.threshold < 2) throw ConfigError("coarsening threshold must be at least 2");
  const auto priority = parse_match_priority(rc.match);
  if (!priority) throw ConfigError("unknown matching priority '" + rc.match + "'");
  s.priority = *priority;
  const auto rescale = parse_rescale(rc.rescale);
  if (!rescale) throw ConfigError("unknown rescale strategy '" + rc.rescale + "'");
  s.rescale = *rescale;
  if (rc.fuzzy_hop_limit < 1) throw ConfigError("fuzzy hop limit must be at least 1");
  s.fuzzy_hop_limit = rc.fuzzy_hop_limit;
  if (!(rc.fuzzy_prune_tau >= 0.0 && rc.fuzzy_prune_tau < 1.0))
    throw ConfigError("fuzzy prune tau must lie in [0,1)");
  s.fuzzy_prune_tau = rc.fuzzy_prune_tau;
  if (rc.constrained_passes < 0) throw ConfigError("constrained pass count must be nonnegative");
  s.constrained_passes = rc.constrained_passes;

  const auto kind = parse_pipeline(rc.pipeline);
  if (!kind) throw ConfigError("unknown pipeline '" + rc.pipeline + "'");
  r.pipeline = *kind;
  if (rc.init_layout && r.pipeline != PipelineKind::None)
    throw ConfigError("--init-layout only applies to the single-level pipeline");

  if (rc.format == "svg") r.format = OutputFormat::Svg;
  else if (rc.format == "json") r.format = OutputFormat::Json;
  else if (rc.format == "both") r.format = OutputFormat::Both;
  else throw ConfigError("unknown output format '" + rc.format + "'");
  if (r.format == OutputFormat::Both && !rc.output)
    throw ConfigError("--format both needs an output prefix");
  return r;
}

/// A whole-graph layout assembled from per-component pipeline runs.
struct GraphLayout {
  Layout layout;
  long total_iterations = 0;
  std::vector<PipelineResult> components;  // layout fields are component-local
};

/// Seed of component c when the input has several components; a connected
/// input uses the master seed unchanged.
inline std::uint64_t component_seed(std::uint64_t seed, std::size_t c) { return derive_seed(seed, 0x10000 + c); }

/// Lays out each connected component on its own and shelf-packs the results;
/// a connected result is centered on its bounding box instead. With an initial
/// layout the solver's coordinates are kept as they are.
inline GraphLayout layout_graph(const Graph& g, PipelineKind kind, const MultilevelSettings& s,
                                const std::optional<Layout>& init = std::nullopt) {
  GraphLayout out;
  auto comps = connected_components(g);
  if (comps.size() <= 1) {
    PipelineResult r = init ? single_level_layout(g, s, *init) : run_pipeline(g, kind, s);
    out.layout = r.layout;
    if (!init && !out.layout.empty()) {
      // Translation-invariant models can drift during descent.
      const BoundingBox box = bounding_box(out.layout);
      const Vec2 mid{0.5 * (box.min.x + box.max.x), 0.5 * (box.min.y + box.max.y)};
      for (auto& p : out.layout) p = p - mid;
    }
    out.total_iterations = r.total_iterations;
    out.components.push_back(std::move(r));
    return out;
  }
  std::vector<Layout> parts;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::sort(comps[c].begin(), comps[c].end());
    const Graph sub = induced_subgraph(g, comps[c]);
    MultilevelSettings local = s;
    local.seed = component_seed(s.seed, c);
    PipelineResult r;
    if (init) {
      Layout x0;
      for (NodeId v : comps[c]) x0.push_back((*init)[v]);
      r = single_level_layout(sub, local, std::move(x0));
    } else {
      r = run_pipeline(sub, kind, local);
    }
    out.total_iterations += r.total_iterations;
    parts.push_back(r.layout);
    out.components.push_back(std::move(r));
  }
  if (init) {
    out.layout.assign(g.node_count(), Vec2{});
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (std::size_t k = 0; k < comps[c].size(); ++k) out.layout[comps[c][k]] = parts[c][k];
  } else {
    out.layout = shelf_pack(g.node_count(), comps, parts, s.force.K);
  }
  return out;
}

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write '" + path + "'");
}

inline void dump_levels(const std::string& dir, const GraphLayout& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  const bool many = result.components.size() > 1;
  for (std::size_t c = 0; c < result.components.size(); ++c) {
    const auto& r = result.components[c];
    const std::string prefix = dir + "/" + (many ? "c" + std::to_string(c) + "_" : std::string());
    for (std::size_t i = 0; i < r.levels.size(); ++i)
      write_text_file(prefix + "level" + std::to_string(i + 1) + ".edges", serialize_edge_list(r.levels[i]));
    for (std::size_t i = 0; i < r.memberships.size(); ++i)
      write_text_file(prefix + "membership" + std::to_string(i + 1) + ".txt",
                      memberships_to_triplets(r.memberships[i]));
  }
}

}  // namespace detail

/// Reads the input graph, lays it out and writes the requested artifacts.
/// Documents go to `<output>.json` / `<output>.svg`, or to `out` when no
/// prefix is set. Diagnostics and the wall time go to `err`.
inline int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ResolvedConfig cfg;
  try {
    cfg = resolve_config(rc);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  LabeledGraph input;
  std::optional<Layout> init;
  try {
    input = load_graph_file(rc.input);
    if (rc.init_layout) init = layout_from_json(detail::read_text_file(*rc.init_layout), input.labels);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    err << "error: " << rc.input << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    const Graph& g = input.graph;
    const GraphLayout result = layout_graph(g, cfg.pipeline, cfg.settings, init);
    detail::check_finite(result.layout, result.total_iterations);
    const LayoutMetrics metrics = compute_metrics(g, result.layout, cfg.settings.force, cfg.settings.distance_mode);

    JsonExtras extra;
    extra.pipeline = std::string(pipeline_name(cfg.pipeline));
    extra.total_iterations = result.total_iterations;
    const bool want_json = cfg.format != OutputFormat::Svg;
    const bool want_svg = cfg.format != OutputFormat::Json;
    if (want_json) {
      const std::string doc = layout_to_json(g, input.labels, result.layout, metrics, rc.seed, extra);
      if (rc.output) detail::write_text_file(*rc.output + ".json", doc);
      else out << doc;
    }
    if (want_svg) {
      const std::string doc = layout_to_svg(g, result.layout);
      if (rc.output) detail::write_text_file(*rc.output + ".svg", doc);
      else out << doc;
    }
    if (rc.trace) {
      std::vector<std::vector<TraceEntry>> traces;
      for (const auto& c : result.components) traces.push_back(c.trace);
      detail::write_text_file(*rc.trace, trace_to_csv(traces));
    }
    if (rc.dump_levels) detail::dump_levels(*rc.dump_levels, result);
  } catch (const NumericError& e) {
    err << "error: numeric failure at " << e.what() << '\n';
    return kExitNumeric;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "wall_time_s " << seconds << '\n';
  return kExitOk;
}

}  // namespace fzlayout
