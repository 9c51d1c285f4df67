#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>

#include "fzlayout/optimizer.hpp"
#include "test_support.hpp"

using namespace fzlayout;

namespace {

ForceConfig only(Rule r, double K = 1.0) {
  ForceConfig cfg;
  cfg.K = K;
  cfg.enable(r);
  return cfg;
}

OptimizerState state_with(double temperature, int progress) {
  OptimizerState s = OptimizerState::initial(1, 1.0);
  s.temperature = temperature;
  s.progress = progress;
  return s;
}

}  // namespace

TEST(UpdateTemperature, FifthDecreaseRaisesTemperature) {
  OptimizerParams p;
  auto s = state_with(1.0, 4);
  update_temperature(s, 9.0, 10.0, p);
  EXPECT_EQ(s.progress, 0);
  EXPECT_DOUBLE_EQ(s.temperature, 1.0 / 0.9);
}

TEST(UpdateTemperature, IncreaseCools) {
  OptimizerParams p;
  auto s = state_with(1.0, 0);
  update_temperature(s, 11.0, 10.0, p);
  EXPECT_EQ(s.progress, 0);
  EXPECT_DOUBLE_EQ(s.temperature, 0.9);
  s = state_with(1.0, 3);
  update_temperature(s, 10.0, 10.0, p);  // equal energy counts as no progress
  EXPECT_EQ(s.progress, 0);
  EXPECT_DOUBLE_EQ(s.temperature, 0.9);
}

TEST(UpdateTemperature, DecreaseCountsProgress) {
  OptimizerParams p;
  auto s = state_with(1.0, 2);
  update_temperature(s, 9.0, 10.0, p);
  EXPECT_EQ(s.progress, 3);
  EXPECT_EQ(s.temperature, 1.0);
}

TEST(UpdateTemperature, PropertyRunsOfDecreases) {
  OptimizerParams p;
  for (int k = 1; k <= 12; ++k) {
    auto s = state_with(0.37, 0);
    double expected = 0.37;
    double e = 1000.0;
    for (int i = 0; i < 5 * k; ++i) {
      update_temperature(s, e - 1.0, e, p);
      e -= 1.0;
      EXPECT_GE(s.progress, 0);
      EXPECT_LE(s.progress, 5);
    }
    for (int i = 0; i < k; ++i) expected = expected / 0.9;
    EXPECT_EQ(s.temperature, expected) << k;
    EXPECT_EQ(s.progress, 0);
  }
}

TEST(UpdateLocalTemperature, Examples) {
  OptimizerParams p;
  const double K = 1.0;
  auto s = OptimizerState::initial(1, K);
  // cos = 1 with oldCos = 1.
  s.heat[0] = 0.5;
  s.displace[0] = {2, 0};
  s.old_displace[0] = {1, 0};
  s.old_cos[0] = 1.0;
  update_local_temperature(s, 0, p, K);
  EXPECT_DOUBLE_EQ(s.heat[0], 0.5 * 1.45);
  EXPECT_EQ(s.old_cos[0], 1.0);

  // Oscillation: cos = -1 with oldCos = -1.
  s.heat[0] = 0.5;
  s.displace[0] = {-1, 0};
  s.old_cos[0] = -1.0;
  update_local_temperature(s, 0, p, K);
  EXPECT_DOUBLE_EQ(s.heat[0], 0.5 * 0.55);

  // Sign change of cos uses the plain rate.
  s.heat[0] = 0.5;
  s.displace[0] = {0, 1};
  s.old_displace[0] = {1, 1};
  s.old_cos[0] = -1.0;
  update_local_temperature(s, 0, p, K);
  EXPECT_DOUBLE_EQ(s.heat[0], 0.5 * (1 + std::sqrt(0.5) * 0.15));

  // Zero old displacement leaves heat alone.
  s.heat[0] = 0.5;
  s.old_displace[0] = {0, 0};
  s.old_cos[0] = 0.3;
  update_local_temperature(s, 0, p, K);
  EXPECT_EQ(s.heat[0], 0.5);
  EXPECT_EQ(s.old_cos[0], 0.3);
}

TEST(UpdateLocalTemperature, HeatStaysClamped) {
  OptimizerParams p;
  const double K = 2.0;
  auto s = OptimizerState::initial(1, K);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5000; ++i) {
    const double a = static_cast<double>(rng() % 1000) / 1000.0 * 6.283185307179586;
    s.old_displace[0] = s.displace[0];
    // Long runs of either persistent motion or oscillation.
    const bool persistent = (i / 300) % 2 == 0;
    s.displace[0] = persistent ? Vec2{1.0, 0.01 * std::cos(a)} : Vec2{(i % 2 ? 1.0 : -1.0), 0.0};
    update_local_temperature(s, 0, p, K);
    ASSERT_GE(s.heat[0], 1e-4 * K);
    ASSERT_LE(s.heat[0], 1e2 * K);
  }
}

TEST(SteepestDescent, EquilibriumUnchanged) {
  const Graph g = fzl_test::path_graph(3);
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Stress);
  Layout x{{0, 0}, {1, 0}, {2, 0}};
  const Layout before = x;
  auto s = OptimizerState::initial(3, 1.0);
  steepest_descent_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  EXPECT_EQ(x, before);
}

TEST(SteepestDescent, NodeMovesHeatTowardTarget) {
  const Graph g(2, {{0, 1, 1.0}});
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Spring, 1.0);
  Layout x{{0, 0}, {5, 0}};
  auto s = OptimizerState::initial(2, 1.0);
  s.heat = {0.75, 0.75};
  steepest_descent_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  EXPECT_DOUBLE_EQ(x[0].x, 0.75);
  EXPECT_EQ(x[0].y, 0.0);
  // Gauss-Seidel: node 1 sees node 0 already moved and still heads toward it.
  EXPECT_DOUBLE_EQ(x[1].x, 5.0 - 0.75);
}

TEST(SteepestDescent, PathOfThreeHeatStaysClamped) {
  // Fixed-length steps let the whole chain crawl in one direction, so the
  // energy is not monotone in general. Heat must still respect its bounds.
  const Graph g = fzl_test::path_graph(3);
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Spring, 1.0);
  const OptimizerParams p;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Layout x = random_layout(3, 1.0, seed);
    auto s = OptimizerState::initial(3, 1.0);
    for (int i = 0; i < 50; ++i) {
      steepest_descent_pass(g, d, x, cfg, s, p, 0.0);
      for (double h : s.heat) {
        ASSERT_GE(h, p.heat_min_factor * cfg.K);
        ASSERT_LE(h, p.heat_max_factor * cfg.K);
      }
    }
    EXPECT_TRUE(std::isfinite(stress_energy(g, d, x, cfg)));
  }
}

TEST(SteepestDescent, ConsistentMotionGrowsHeat) {
  // Two nodes far apart both head the same way on every pass.
  const Graph g(2, {{0, 1, 1.0}});
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Spring, 1.0);
  Layout x{{0, 0}, {50, 0}};
  auto s = OptimizerState::initial(2, 1.0);
  s.heat = {0.1, 0.1};
  steepest_descent_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  steepest_descent_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  EXPECT_DOUBLE_EQ(s.heat[0], 0.1 * 1.15);
  steepest_descent_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  EXPECT_DOUBLE_EQ(s.heat[0], 0.1 * 1.15 * 1.45);
}

TEST(ConjugateGradient, ZeroFieldIsNoOp) {
  const Graph g = fzl_test::path_graph(3);
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Stress);
  Layout x{{0, 0}, {1, 0}, {2, 0}};
  const Layout before = x;
  auto s = OptimizerState::initial(3, 1.0);
  conjugate_gradient_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  EXPECT_EQ(x, before);
}

TEST(ConjugateGradient, NegativeBetaRestartsToRawForce) {
  const Graph g(2, {{0, 1, 1.0}});
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Spring, 1.0);
  Layout x{{0, 0}, {3, 0}};
  auto s = OptimizerState::initial(2, 1.0);
  const auto f = composite_force(g, d, x, cfg, 0.0);
  // A larger previous force along the same line makes the PR numerator negative.
  s.has_previous = true;
  s.previous_force = {3.0 * f[0], 3.0 * f[1]};
  s.previous_direction = {{0, 7}, {0, -7}};
  double num = 0.0;
  for (int v = 0; v < 2; ++v) num += dot(f[v], f[v] - s.previous_force[v]);
  ASSERT_LT(num, 0.0);
  conjugate_gradient_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  for (int v = 0; v < 2; ++v) {
    EXPECT_EQ(s.previous_direction[v], f[v]);
  }
}

TEST(ConjugateGradient, UphillDirectionRestarts) {
  const Graph g(2, {{0, 1, 1.0}});
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Spring, 1.0);
  Layout x{{0, 0}, {3, 0}};
  auto s = OptimizerState::initial(2, 1.0);
  const auto f = composite_force(g, d, x, cfg, 0.0);
  // Small previous force gives a positive beta; a huge opposing previous
  // direction would then dominate and point uphill.
  s.has_previous = true;
  s.previous_force = {0.5 * f[0], 0.5 * f[1]};
  s.previous_direction = {-1e3 * f[0], -1e3 * f[1]};
  conjugate_gradient_pass(g, d, x, cfg, s, OptimizerParams{}, 0.0);
  for (int v = 0; v < 2; ++v) EXPECT_EQ(s.previous_direction[v], f[v]);
}

TEST(ConjugateGradient, TwoNodeSpringConverges) {
  const Graph g(2, {{0, 1, 1.0}});
  const auto d = shortest_path_distances(g);
  const double K = 1.5;
  const ForceConfig cfg = only(Rule::Spring, K);
  Layout x{{0, 0}, {2.0 * K, 0}};
  auto s = OptimizerState::initial(2, K);
  OptimizerParams p;
  int passes = 0;
  while (passes < 100 && std::abs(norm(x[1] - x[0]) - K) > 1e-3 * K) {
    conjugate_gradient_pass(g, d, x, cfg, s, p, 0.0);
    ++passes;
  }
  EXPECT_LE(std::abs(norm(x[1] - x[0]) - K), 1e-3 * K);
  EXPECT_LE(passes, 100);
}

TEST(ForceDirectedLayout, ZeroIterationsReturnsInput) {
  const Graph g = fzl_test::path_graph(3);
  const auto d = shortest_path_distances(g);
  OptimizerParams p;
  p.max_iterations = 0;
  const Layout x0{{0.1, 0.2}, {1, 3}, {-2, 0}};
  const auto run = force_directed_layout(g, d, only(Rule::Spring), p, x0);
  EXPECT_EQ(run.layout, x0);
  EXPECT_TRUE(run.trace.empty());
}

TEST(ForceDirectedLayout, PathStressDropsThousandfold) {
  const Graph g = fzl_test::path_graph(3);
  const auto d = shortest_path_distances(g);
  const ForceConfig cfg = only(Rule::Spring, 1.0);
  std::vector<double> ratios;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Layout x0 = random_layout(3, 1.0, seed);
    const auto run = force_directed_layout(g, d, cfg, OptimizerParams{}, x0);
    ratios.push_back(stress_energy(g, d, run.layout, cfg) / stress_energy(g, d, x0, cfg));
  }
  std::nth_element(ratios.begin(), ratios.begin() + 5, ratios.end());
  EXPECT_LE(ratios[5], 1e-3);
}

TEST(ForceDirectedLayout, Deterministic) {
  const Graph g = fzl_test::random_connected_graph(15, 3.0, 17);
  const auto d = shortest_path_distances(g);
  ForceConfig cfg = only(Rule::Stress, 1.0);
  cfg.enable(Rule::NodeEdgeRepulsion, 0.1);
  OptimizerParams p;
  p.max_iterations = 60;
  const auto a = force_directed_layout(g, d, cfg, p, random_layout(15, 1.0, 3));
  const auto b = force_directed_layout(g, d, cfg, p, random_layout(15, 1.0, 3));
  ASSERT_EQ(a.layout.size(), b.layout.size());
  for (std::size_t v = 0; v < a.layout.size(); ++v) {
    EXPECT_EQ(std::memcmp(&a.layout[v], &b.layout[v], sizeof(Vec2)), 0);
  }
  EXPECT_EQ(a.trace.size(), 60u);
  EXPECT_EQ(a.trace.front().phase, Phase::SteepestDescent);
  EXPECT_EQ(a.trace.back().phase, Phase::ConjugateGradient);
}

TEST(ForceDirectedLayout, TwoNodeSpringAnySeparation) {
  const Graph g(2, {{0, 1, 1.0}});
  const auto d = shortest_path_distances(g);
  const double K = 1.0;
  const ForceConfig cfg = only(Rule::Spring, K);
  for (double sep : {1e-2, 0.1, 0.5, 0.9, 1.1, 3.0, 10.0, 37.0, 100.0}) {
    const Layout x0{{0.0, 0.0}, {sep * K * 0.6, sep * K * 0.8}};
    const auto run = force_directed_layout(g, d, cfg, OptimizerParams{}, x0);
    EXPECT_NEAR(norm(run.layout[1] - run.layout[0]), K, 1e-3 * K) << "separation " << sep;
  }
}

TEST(ForceDirectedLayout, StressEquilibriumIdentity) {
  const ForceConfig cfg = only(Rule::Stress, 1.0);
  for (const Graph& g : {fzl_test::path_graph(8), fzl_test::cycle_graph(12), fzl_test::grid_graph(4, 4),
                         fzl_test::star_graph(10)}) {
    const auto d = shortest_path_distances(g);
    const auto run = force_directed_layout(g, d, cfg, OptimizerParams{}, random_layout(g.node_count(), 1.0, 8));
    EXPECT_LE(*equilibrium_residual(g, d, run.layout, cfg), 1e-2);
  }
}

TEST(ForceDirectedLayout, RejectsMismatchedInitialLayout) {
  const Graph g = fzl_test::path_graph(3);
  const auto d = shortest_path_distances(g);
  EXPECT_THROW(force_directed_layout(g, d, only(Rule::Spring), OptimizerParams{}, Layout(2)), ValidationError);
  OptimizerParams bad;
  bad.phase_split = 0.0;
  EXPECT_THROW(force_directed_layout(g, d, only(Rule::Spring), bad, Layout(3)), ConfigError);
}
