#include <catch2/catch_amalgamated.hpp>

#include "xplore/generators.hpp"

using namespace xplore;

TEST_CASE("tree_cycles is deterministic per seed") {
  TreeCyclesConfig cfg;
  cfg.num_graphs = 100;
  cfg.nodes_per_graph = 16;
  cfg.cycle_size = 4;
  cfg.seed = 7;
  const Dataset a = make_tree_cycles(cfg);
  const Dataset b = make_tree_cycles(cfg);
  REQUIRE(a == b);
  cfg.seed = 8;
  REQUIRE_FALSE(make_tree_cycles(cfg) == a);
}

TEST_CASE("tree_cycles class soundness") {
  TreeCyclesConfig cfg;
  cfg.num_graphs = 60;
  cfg.nodes_per_graph = 20;
  cfg.seed = 3;
  const Dataset d = make_tree_cycles(cfg);
  std::size_t class0 = 0, class1 = 0;
  for (const Graph& g : d.graphs) {
    g.check_invariants();
    REQUIRE(g.n == 20);
    if (*g.graph_label == 0) {
      ++class0;
      REQUIRE_FALSE(has_cycle(g));
      // A connected acyclic graph has exactly n-1 edges.
      REQUIRE(g.edge_count() == g.n - 1);
    } else {
      ++class1;
      REQUIRE(has_cycle(g));
    }
  }
  REQUIRE(class0 == 30);
  REQUIRE(class1 == 30);
}

TEST_CASE("tree_cycles rejects invalid sizes") {
  TreeCyclesConfig cfg;
  cfg.nodes_per_graph = 2;
  REQUIRE_THROWS_AS(make_tree_cycles(cfg), ConfigError);
  cfg = {};
  cfg.cycle_size = 2;
  REQUIRE_THROWS_AS(make_tree_cycles(cfg), ConfigError);
  cfg = {};
  cfg.nodes_per_graph = 6;
  cfg.cycle_size = 6;  // no room for a base tree
  REQUIRE_THROWS_AS(make_tree_cycles(cfg), ConfigError);
}

TEST_CASE("ba_shapes hits the configured scale and labels roles") {
  BaShapesConfig cfg;
  cfg.num_graphs = 40;
  cfg.seed = 5;
  const Dataset d = make_ba_shapes(cfg);
  REQUIRE(d.feature_dim == 4);
  for (const Graph& g : d.graphs) {
    g.check_invariants();
    REQUIRE(g.n == 64);  // 29-node base + 7 houses of 5
    REQUIRE(g.node_labels.has_value());
    std::size_t motif_nodes = 0;
    for (int lbl : *g.node_labels) motif_nodes += lbl == 1 ? 1 : 0;
    if (*g.graph_label == 1) REQUIRE(motif_nodes == 35);
    else REQUIRE(motif_nodes == 0);
  }
}

TEST_CASE("ba_shapes house motif is present in class-1 graphs") {
  BaShapesConfig cfg;
  cfg.num_graphs = 2;
  cfg.perturb_fraction = 0.0;  // keep the motif edges unambiguous
  cfg.seed = 9;
  const Dataset d = make_ba_shapes(cfg);
  for (const Graph& g : d.graphs) {
    if (*g.graph_label == 0) continue;
    // First house occupies nodes [29, 34): check its 6 internal edges.
    const std::size_t base = 29;
    REQUIRE(g.adj(base + 0, base + 1));
    REQUIRE(g.adj(base + 0, base + 2));
    REQUIRE(g.adj(base + 1, base + 2));
    REQUIRE(g.adj(base + 1, base + 3));
    REQUIRE(g.adj(base + 2, base + 4));
    REQUIRE(g.adj(base + 3, base + 4));
  }
}

TEST_CASE("tree_grid paper scale and determinism") {
  TreeGridConfig cfg;
  cfg.num_graphs = 30;
  cfg.seed = 13;
  const Dataset a = make_tree_grid(cfg);
  REQUIRE(a == make_tree_grid(cfg));
  for (const Graph& g : a.graphs) {
    REQUIRE(g.n == 64);
    if (*g.graph_label == 0) {
      REQUIRE_FALSE(has_cycle(g));
    } else {
      REQUIRE(has_cycle(g));  // the 3x3 grid contains 4-cycles
    }
  }
  TreeGridConfig bad;
  bad.grid_size = 1;
  REQUIRE_THROWS_AS(make_tree_grid(bad), ConfigError);
}

TEST_CASE("generated splits are class balanced enough to train on") {
  TreeCyclesConfig cfg;
  cfg.num_graphs = 200;
  cfg.nodes_per_graph = 12;
  cfg.cycle_size = 3;
  cfg.seed = 21;
  const Dataset d = make_tree_cycles(cfg);
  std::size_t train1 = 0;
  for (std::size_t i : d.train_idx) train1 += *d.graphs[i].graph_label;
  const double frac = static_cast<double>(train1) / static_cast<double>(d.train_idx.size());
  REQUIRE(frac > 0.35);
  REQUIRE(frac < 0.65);
}
