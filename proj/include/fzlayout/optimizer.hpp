#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fzlayout/errors.hpp"
#include "fzlayout/force_models.hpp"
#include "fzlayout/geometry.hpp"
#include "fzlayout/graph.hpp"
#include "fzlayout/random.hpp"

namespace fzlayout {

struct OptimizerParams {
  double cooling = 0.9;        // t: temperature factor on failure, divisor on progress
  double heat_rate = 0.15;     // r
  double heat_boost = 3.0;     // s: extra factor when the motion keeps its sign
  double phase_split = 0.5;    // fraction of iterations spent in steepest descent
  long max_iterations = 300;
  int progress_limit = 5;      // consecutive decreases before the temperature grows
  double heat_min_factor = 1e-4;
  double heat_max_factor = 1e2;

  void validate() const {
    if (!(cooling > 0.0 && cooling < 1.0)) throw ConfigError("cooling factor must lie in (0,1)");
    if (!(phase_split > 0.0 && phase_split <= 1.0)) throw ConfigError("phase split must lie in (0,1]");
    if (max_iterations < 0) throw ConfigError("iteration count must be nonnegative");
    if (!(heat_rate > 0.0) || !(heat_boost > 0.0)) throw ConfigError("heat rates must be positive");
  }
};

/// Step-length state shared by the two optimization phases.
struct OptimizerState {
  double temperature = 1.0;
  int progress = 0;
  std::vector<double> heat;
  std::vector<Vec2> displace;
  std::vector<Vec2> old_displace;
  std::vector<double> old_cos;
  // Conjugate-gradient memory.
  std::vector<Vec2> previous_force;
  std::vector<Vec2> previous_direction;
  bool has_previous = false;
  double last_energy = 0.0;
  bool has_energy = false;

  static OptimizerState initial(std::size_t n, double K) {
    OptimizerState s;
    s.temperature = 0.1 * K * std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
    s.heat.assign(n, K);
    s.displace.assign(n, Vec2{});
    s.old_displace.assign(n, Vec2{});
    s.old_cos.assign(n, 0.0);
    return s;
  }
};

/// Global adaptive step: unchanged while energy drops, grows after
/// `progress_limit` consecutive drops, shrinks as soon as energy rises.
inline void update_temperature(OptimizerState& state, double energy, double energy0,
                               const OptimizerParams& params) {
  if (energy < energy0) {
    state.progress += 1;
    if (state.progress >= params.progress_limit) {
      state.progress = 0;
      state.temperature = state.temperature / params.cooling;
    }
  } else {
    state.progress = 0;
    state.temperature = params.cooling * state.temperature;
  }
}

/// Per-node step: compares displace[v] with old_displace[v]. Consistent
/// motion (or steady oscillation) scales heat by 1 + cos*r*s, anything else
/// by 1 + cos*r. Heat is clamped to [heat_min_factor*K, heat_max_factor*K].
inline void update_local_temperature(OptimizerState& state, NodeId v, const OptimizerParams& params,
                                     double K) {
  const Vec2 cur = state.displace[v];
  const Vec2 old = state.old_displace[v];
  const double cur_norm = norm(cur);
  const double old_norm = norm(old);
  if (cur_norm == 0.0 || old_norm == 0.0) return;
  const double c = std::clamp(dot(cur, old) / (cur_norm * old_norm), -1.0, 1.0);
  double& heat = state.heat[v];
  if (state.old_cos[v] * c > 0.0)
    heat *= 1.0 + c * params.heat_rate * params.heat_boost;
  else
    heat *= 1.0 + c * params.heat_rate;
  heat = std::clamp(heat, params.heat_min_factor * K, params.heat_max_factor * K);
  state.old_cos[v] = c;
}

/// Visitor that may restrict a tentative node position (used by the
/// circle-constrained refinement passes). Receives node id and position.
using PositionConstraint = std::function<Vec2(NodeId, Vec2)>;

/// One Gauss-Seidel sweep in ascending node order. Each node's force is
/// evaluated against the partially updated layout and the node moves by
/// heat[v] along the force direction right away.
inline void steepest_descent_pass(const Graph& g, const DistanceMatrix& d, Layout& x, const ForceConfig& cfg,
                                  OptimizerState& state, const OptimizerParams& params,
                                  double iteration_phase, const PositionConstraint& constraint = {}) {
  const std::size_t n = g.node_count();
  for (NodeId v = 0; v < n; ++v) {
    const Vec2 f = composite_node_force(g, d, x, cfg, iteration_phase, v);
    state.displace[v] = f;
    update_local_temperature(state, v, params, cfg.K);
    const double fn = norm(f);
    if (fn == 0.0 || !std::isfinite(fn)) {
      state.displace[v] = Vec2{};
      continue;
    }
    state.displace[v] = (state.heat[v] / fn) * f;
    Vec2 next = x[v] + state.displace[v];
    if (constraint) next = constraint(v, next);
    x[v] = next;
  }
  state.old_displace = state.displace;
}

/// One nonlinear conjugate-gradient step. Direction p = f + beta p_prev with
/// the Polak-Ribiere beta clamped at zero (and reset when p is not a descent
/// direction); every node moves by
/// temperature * p_v / max_u |p_u| simultaneously, then the global
/// temperature adapts to the change in composite energy.
inline void conjugate_gradient_pass(const Graph& g, const DistanceMatrix& d, Layout& x, const ForceConfig& cfg,
                                    OptimizerState& state, const OptimizerParams& params,
                                    double iteration_phase) {
  const std::size_t n = g.node_count();
  if (!state.has_energy) {
    state.last_energy = composite_energy(g, d, x, cfg, iteration_phase);
    state.has_energy = true;
  }
  const ForceField f = composite_force(g, d, x, cfg, iteration_phase);

  double beta = 0.0;
  if (state.has_previous && state.previous_force.size() == n) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      num += dot(f[v], f[v] - state.previous_force[v]);
      den += norm2(state.previous_force[v]);
    }
    if (den > 0.0) beta = std::max(0.0, num / den);
  }
  std::vector<Vec2> direction(n);
  double slope = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    direction[v] = f[v];
    if (beta > 0.0) direction[v] += beta * state.previous_direction[v];
    slope += dot(direction[v], f[v]);
  }
  // Without a line search the conjugate direction can point uphill; fall
  // back to the force itself in that case.
  if (beta > 0.0 && !(slope > 0.0)) direction = f;
  double max_norm = 0.0;
  for (const auto& p : direction) max_norm = std::max(max_norm, norm(p));
  state.previous_force = f;
  state.previous_direction = direction;
  state.has_previous = true;
  if (max_norm == 0.0 || !std::isfinite(max_norm)) return;

  const double scale = state.temperature / max_norm;
  for (std::size_t v = 0; v < n; ++v) {
    state.displace[v] = scale * direction[v];
    x[v] += state.displace[v];
  }
  const double energy = composite_energy(g, d, x, cfg, iteration_phase);
  update_temperature(state, energy, state.last_energy, params);
  state.last_energy = energy;
}

enum class Phase { SteepestDescent, ConjugateGradient };

struct TraceEntry {
  long iteration = 0;
  Phase phase = Phase::SteepestDescent;
  double energy = 0.0;
  double temperature = 0.0;
};

struct LayoutRun {
  Layout layout;
  std::vector<TraceEntry> trace;
  long iterations = 0;
};

/// Uniform random positions in a square of side K * sqrt(n) centered at 0.
inline Layout random_layout(std::size_t n, double K, std::uint64_t seed) {
  Rng rng(seed);
  const double side = K * std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
  Layout x(n);
  for (auto& p : x) {
    p.x = rng.uniform(-0.5 * side, 0.5 * side);
    p.y = rng.uniform(-0.5 * side, 0.5 * side);
  }
  return x;
}

namespace detail {

inline void check_finite(const Layout& x, long iteration) {
  for (std::size_t v = 0; v < x.size(); ++v)
    if (!is_finite(x[v])) throw NumericError(iteration, "non-finite position for node " + std::to_string(v));
}

}  // namespace detail

/// The two-phase optimizer: round(phase_split * max_iterations) steepest
/// descent sweeps, then conjugate-gradient steps for the rest. d may be empty
/// when no enabled rule uses graph distances.
inline LayoutRun force_directed_layout(const Graph& g, const DistanceMatrix& d, const ForceConfig& cfg,
                                       const OptimizerParams& params, Layout x0) {
  cfg.validate();
  params.validate();
  if (x0.size() != g.node_count())
    throw ValidationError("initial layout has " + std::to_string(x0.size()) + " positions for " +
                          std::to_string(g.node_count()) + " nodes");
  LayoutRun run;
  run.layout = std::move(x0);
  const long total = params.max_iterations;
  if (total == 0 || g.node_count() == 0) return run;
  if (cfg.needs_distances() && d.size() != g.node_count())
    throw ConfigError("distance matrix required by the enabled rules is missing");

  OptimizerState state = OptimizerState::initial(g.node_count(), cfg.K);
  const long sd_passes = std::lround(params.phase_split * static_cast<double>(total));
  Layout& x = run.layout;
  for (long it = 0; it < total; ++it) {
    const double phase = static_cast<double>(it) / static_cast<double>(total);
    TraceEntry entry;
    entry.iteration = it;
    if (it < sd_passes) {
      steepest_descent_pass(g, d, x, cfg, state, params, phase);
      entry.phase = Phase::SteepestDescent;
      entry.energy = composite_energy(g, d, x, cfg, phase);
    } else {
      // The active rule set can change at the node-edge activation point,
      // which would make the energy comparison meaningless.
      if (state.has_energy && node_edge_active(cfg, phase) !=
                                  node_edge_active(cfg, static_cast<double>(it - 1) / total))
        state.has_energy = false;
      conjugate_gradient_pass(g, d, x, cfg, state, params, phase);
      entry.phase = Phase::ConjugateGradient;
      entry.energy = state.last_energy;
    }
    entry.temperature = state.temperature;
    detail::check_finite(x, it);
    if (!std::isfinite(entry.energy)) throw NumericError(it, "non-finite energy");
    run.trace.push_back(entry);
  }
  run.iterations = total;
  return run;
}

}  // namespace fzlayout
