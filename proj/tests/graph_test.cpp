#include <gtest/gtest.h>

#include "fzlayout/edge_list.hpp"
#include "fzlayout/graph.hpp"
#include "test_support.hpp"

using namespace fzlayout;
using fzl_test::floyd_warshall;

TEST(LoadGraph, PathOfThree) {
  const auto lg = load_graph("0 1\n1 2");
  EXPECT_EQ(lg.graph.node_count(), 3u);
  ASSERT_EQ(lg.graph.edge_count(), 2u);
  EXPECT_EQ(lg.graph.edges()[0], (Edge{0, 1, 1.0}));
  EXPECT_EQ(lg.graph.edges()[1], (Edge{1, 2, 1.0}));
}

TEST(LoadGraph, DuplicateEdgesMergeBySum) {
  const auto lg = load_graph("0 1 2.0\n0 1 3.0");
  ASSERT_EQ(lg.graph.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(lg.graph.edges()[0].weight, 5.0);
}

TEST(LoadGraph, ReversedDuplicateMerges) {
  const auto lg = load_graph("a b\nb a 2");
  ASSERT_EQ(lg.graph.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(lg.graph.edges()[0].weight, 3.0);
}

TEST(LoadGraph, SelfLoopDroppedButNodeKept) {
  const auto lg = load_graph("0 0");
  EXPECT_EQ(lg.graph.node_count(), 1u);
  EXPECT_EQ(lg.graph.edge_count(), 0u);
}

TEST(LoadGraph, TokensMapInFirstSeenOrder) {
  const auto lg = load_graph("# header\nzeta alpha  # trailing comment\n\n  alpha  mid 0.5\n");
  ASSERT_EQ(lg.labels, (std::vector<std::string>{"zeta", "alpha", "mid"}));
  EXPECT_TRUE(lg.graph.has_edge(0, 1));
  EXPECT_DOUBLE_EQ(*lg.graph.edge_weight(1, 2), 0.5);
}

TEST(LoadGraph, MalformedLineReportsLineNumber) {
  try {
    load_graph("0 1\n0 1 2 3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_graph("0\n"), ParseError);
  EXPECT_THROW(load_graph("0 1 abc\n"), ParseError);
}

TEST(LoadGraph, NonPositiveWeightIsValidationError) {
  EXPECT_THROW(load_graph("0 1 0\n"), ValidationError);
  EXPECT_THROW(load_graph("0 1 -2\n"), ValidationError);
  EXPECT_THROW(load_graph("0 1 inf\n"), ValidationError);
}

TEST(LoadGraph, MissingFileIsIoError) {
  EXPECT_THROW(load_graph_file("/nonexistent/graph.txt"), IoError);
}

TEST(Graph, AdjacencySortedAndWeighted) {
  const Graph g(4, {{2, 0, 1.5}, {0, 1, 1.0}, {3, 0, 2.0}});
  const auto nb = g.neighbors(0);
  ASSERT_EQ(nb.size(), 3u);
  EXPECT_EQ(nb[0].node, 1u);
  EXPECT_EQ(nb[1].node, 2u);
  EXPECT_EQ(nb[2].node, 3u);
  EXPECT_DOUBLE_EQ(nb[2].weight, 2.0);
  EXPECT_FALSE(g.unit_edge_weights());
  EXPECT_THROW(Graph(2, {{0, 2, 1.0}}), ValidationError);
  EXPECT_THROW(Graph(2, {}, {1.0, 0.0}), ValidationError);
}

TEST(ShortestPaths, PathDistances) {
  const auto d = shortest_path_distances(fzl_test::path_graph(3));
  EXPECT_EQ(d(0, 2), 2.0);
  EXPECT_EQ(d(2, 0), 2.0);
  EXPECT_EQ(d(1, 1), 0.0);
}

TEST(ShortestPaths, SingleNode) {
  const auto d = shortest_path_distances(Graph(1));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d(0, 0), 0.0);
}

TEST(ShortestPaths, WeightedTriangleMatchesFloydWarshall) {
  const Graph g(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}});
  const auto oracle = floyd_warshall(g);
  const auto d = shortest_path_distances(g);
  EXPECT_EQ(oracle[0][2], 2.0);
  EXPECT_EQ(d(0, 2), oracle[0][2]);
  EXPECT_EQ(shortest_path_distances(g, DistanceMode::Hops)(0, 2), 1.0);
}

TEST(ShortestPaths, DisconnectedNamesNodes) {
  const Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  try {
    shortest_path_distances(g);
    FAIL() << "expected GraphError";
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("nodes 0 and 2"), std::string::npos);
  }
}

TEST(ShortestPaths, PropertyTriangleInequalityAndOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 2 + seed % 29;
    const Graph g = fzl_test::random_connected_graph(n, 3.0, seed, seed % 2 == 0);
    const auto d = shortest_path_distances(g);
    const auto oracle = floyd_warshall(g);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        ASSERT_NEAR(d(i, j), oracle[i][j], 1e-12 * (1 + oracle[i][j]));
        ASSERT_NEAR(d(i, j), d(j, i), 1e-12 * (1 + d(i, j)));
        for (std::size_t k = 0; k < n; ++k) ASSERT_LE(d(i, j), d(i, k) + d(k, j) + 1e-12);
      }
  }
}

TEST(Components, Examples) {
  EXPECT_EQ(connected_components(fzl_test::path_graph(3)), (std::vector<std::vector<NodeId>>{{0, 1, 2}}));
  EXPECT_EQ(connected_components(Graph(3)), (std::vector<std::vector<NodeId>>{{0}, {1}, {2}}));
  EXPECT_EQ(connected_components(Graph(4, {{0, 1, 1.0}, {2, 3, 1.0}})),
            (std::vector<std::vector<NodeId>>{{0, 1}, {2, 3}}));
}

TEST(Diameter, Examples) {
  EXPECT_EQ(graph_diameter(fzl_test::path_graph(5)), 4.0);
  EXPECT_EQ(graph_diameter(fzl_test::complete_graph(4)), 1.0);
  const Graph grid = fzl_test::grid_graph(3, 3);
  double oracle = 0.0;
  for (const auto& row : floyd_warshall(grid))
    for (double v : row) oracle = std::max(oracle, v);
  EXPECT_EQ(oracle, 4.0);
  EXPECT_EQ(graph_diameter(grid), oracle);
  EXPECT_THROW(graph_diameter(Graph(2)), GraphError);
}

TEST(Diameter, DoubleSweepIsLowerBoundBeyondExactLimit) {
  const Graph p = fzl_test::path_graph(kExactDiameterLimit + 10);
  // Double sweep is exact on trees.
  EXPECT_EQ(graph_diameter(p), static_cast<double>(kExactDiameterLimit + 9));
}

TEST(Subgraph, InducedAndQuotient) {
  const Graph g = fzl_test::path_graph(4);
  const std::vector<NodeId> nodes{1, 2, 3};
  const Graph sub = induced_subgraph(g, nodes);
  EXPECT_EQ(sub.node_count(), 3u);
  EXPECT_EQ(sub.edge_count(), 2u);
  const std::vector<NodeId> parts{0, 0, 1, 1};
  const Graph q = quotient_graph(g, parts, 2);
  EXPECT_EQ(q.node_count(), 2u);
  ASSERT_EQ(q.edge_count(), 1u);
  EXPECT_EQ(q.edges()[0].weight, 1.0);
  EXPECT_EQ(q.node_weight(0), 2.0);
}

TEST(EdgeList, SerializeRoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 1 + seed % 17;
    Graph g = fzl_test::random_connected_graph(n, 2.5, seed, seed % 3 == 0);
    // Drop a few edges to create isolated nodes and out-of-order first appearances.
    std::vector<Edge> kept;
    for (const auto& e : g.edges())
      if ((e.u + e.v + seed) % 4 != 0) kept.push_back(e);
    const Graph h(n, kept);
    const auto reloaded = load_graph(serialize_edge_list(h));
    EXPECT_EQ(reloaded.graph, h) << "seed " << seed;
  }
}
