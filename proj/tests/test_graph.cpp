#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "xplore/graph.hpp"

using namespace xplore;

TEST_CASE("graph_edit_distance identity is zero") {
  Graph g = testutil::random_graph(6, 2, 0.4, 11);
  const EditBreakdown eb = graph_edit_distance(g, g);
  REQUIRE(eb.edges_added == 0);
  REQUIRE(eb.edges_removed == 0);
  REQUIRE(eb.features_changed == 0);
  REQUIRE(eb.structural_ged == 0);
}

TEST_CASE("single edge removal counts once") {
  Graph g(4, 1);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  Graph h = g;
  h.remove_edge(1, 2);
  const EditBreakdown eb = graph_edit_distance(g, h);
  REQUIRE(eb.edges_removed == 1);
  REQUIRE(eb.edges_added == 0);
  REQUIRE(eb.structural_ged == 1);
}

TEST_CASE("GED matches brute-force symmetric difference on random pairs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = testutil::random_graph(6, 1, 0.4, 100 + seed);
    Graph h = testutil::random_graph(6, 1, 0.5, 200 + seed);
    // Brute force: inspect every unordered node pair directly.
    std::size_t added = 0, removed = 0;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) {
        if (!g.adj(i, j) && h.adj(i, j)) ++added;
        if (g.adj(i, j) && !h.adj(i, j)) ++removed;
      }
    const EditBreakdown eb = graph_edit_distance(g, h);
    REQUIRE(eb.edges_added == added);
    REQUIRE(eb.edges_removed == removed);
    REQUIRE(eb.structural_ged == added + removed);
  }
}

TEST_CASE("GED is symmetric in its structural part") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = testutil::random_graph(7, 1, 0.3, 300 + seed);
    Graph h = testutil::random_graph(7, 1, 0.6, 400 + seed);
    REQUIRE(graph_edit_distance(g, h).structural_ged ==
            graph_edit_distance(h, g).structural_ged);
  }
}

TEST_CASE("node-count mismatch is a contract error") {
  Graph g(4, 1), h(5, 1);
  REQUIRE_THROWS_AS(graph_edit_distance(g, h), ContractError);
}

TEST_CASE("feature edits respect the tolerance") {
  Graph g(3, 2), h(3, 2);
  h.features(1, 0) = 5e-10;  // below tolerance
  h.features(2, 1) = 1e-3;   // above tolerance
  const EditBreakdown eb = graph_edit_distance(g, h);
  REQUIRE(eb.features_changed == 1);
  REQUIRE(eb.structural_ged == 0);
}

TEST_CASE("has_cycle distinguishes trees from cyclic graphs") {
  Graph path(4, 1);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  path.add_edge(2, 3);
  REQUIRE_FALSE(has_cycle(path));
  path.add_edge(3, 0);
  REQUIRE(has_cycle(path));

  Graph forest(6, 1);  // two components, no cycle
  forest.add_edge(0, 1);
  forest.add_edge(3, 4);
  forest.add_edge(4, 5);
  REQUIRE_FALSE(has_cycle(forest));
  forest.add_edge(3, 5);
  REQUIRE(has_cycle(forest));
}

TEST_CASE("graph invariants reject broken structures") {
  Graph g(3, 1);
  g.adjacency[0 * 3 + 1] = 1;  // asymmetric on purpose
  REQUIRE_THROWS_AS(g.check_invariants(), ContractError);
  Graph h(3, 1);
  h.adjacency[0 * 3 + 0] = 1;  // diagonal entry
  REQUIRE_THROWS_AS(h.check_invariants(), ContractError);
  REQUIRE_THROWS_AS(Graph(2, 1).add_edge(1, 1), ContractError);
}

TEST_CASE("dataset split covers all graphs 80/20") {
  Dataset d;
  for (int i = 0; i < 10; ++i) {
    Graph g(3, 1);
    g.graph_label = i % 2;
    d.graphs.push_back(g);
  }
  d.num_classes = 2;
  d.feature_dim = 1;
  d.make_split();
  REQUIRE(d.train_idx.size() == 8);
  REQUIRE(d.test_idx.size() == 2);
  d.check_invariants();
}
