#pragma once

#include <optional>
#include <string_view>

#include "fzlayout/fuzzy_multilevel.hpp"
#include "fzlayout/multilevel.hpp"
#include "fzlayout/partition_multilevel.hpp"
#include "fzlayout/refinement.hpp"

namespace fzlayout {

enum class PipelineKind { None, EC, MIVS, Partition, Fuzzy };

inline std::optional<PipelineKind> parse_pipeline(std::string_view s) {
  if (s == "none") return PipelineKind::None;
  if (s == "ec") return PipelineKind::EC;
  if (s == "mivs") return PipelineKind::MIVS;
  if (s == "partition") return PipelineKind::Partition;
  if (s == "fuzzy") return PipelineKind::Fuzzy;
  return std::nullopt;
}

inline std::string_view pipeline_name(PipelineKind k) {
  switch (k) {
    case PipelineKind::None: return "none";
    case PipelineKind::EC: return "ec";
    case PipelineKind::MIVS: return "mivs";
    case PipelineKind::Partition: return "partition";
    case PipelineKind::Fuzzy: return "fuzzy";
  }
  return "none";
}

/// Plain two-phase run, from a random start unless x0 is given.
inline PipelineResult single_level_layout(const Graph& g, const MultilevelSettings& s,
                                          std::optional<Layout> x0 = std::nullopt) {
  s.force.validate();
  s.optimizer.validate();
  PipelineResult out;
  Layout start = x0 ? std::move(*x0) : random_layout(g.node_count(), s.force.K, derive_seed(s.seed, 0));
  out.layout = refine_level(g, level_distances(g, true, s), std::move(start), s, out);
  return out;
}

inline PipelineResult run_pipeline(const Graph& g, PipelineKind kind, const MultilevelSettings& s) {
  switch (kind) {
    case PipelineKind::None: return single_level_layout(g, s);
    case PipelineKind::EC: return multilevel_layout(g, s, CoarseningKind::EC);
    case PipelineKind::MIVS: return multilevel_layout(g, s, CoarseningKind::MIVS);
    case PipelineKind::Partition: return partition_multilevel_layout(g, s);
    case PipelineKind::Fuzzy: return fuzzy_multilevel_layout(g, s);
  }
  return single_level_layout(g, s);
}

}  // namespace fzlayout
