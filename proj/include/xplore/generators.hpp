#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "xplore/graph.hpp"
#include "xplore/rng.hpp"

namespace xplore {

// Uniform random labelled tree via Prufer sequence decoding.
inline void add_random_tree(Graph& g, std::size_t first, std::size_t count, Rng& rng) {
  if (count <= 1) return;
  if (count == 2) {
    g.add_edge(first, first + 1);
    return;
  }
  std::vector<std::size_t> prufer(count - 2);
  for (auto& v : prufer) v = uniform_index(rng, count);
  std::vector<std::size_t> deg(count, 1);
  for (auto v : prufer) ++deg[v];
  std::set<std::size_t> leaves;
  for (std::size_t v = 0; v < count; ++v)
    if (deg[v] == 1) leaves.insert(v);
  for (auto v : prufer) {
    const std::size_t leaf = *leaves.begin();
    leaves.erase(leaves.begin());
    g.add_edge(first + leaf, first + v);
    if (--deg[v] == 1) leaves.insert(v);
  }
  const std::size_t a = *leaves.begin();
  const std::size_t b = *std::next(leaves.begin());
  g.add_edge(first + a, first + b);
}

// Barabasi-Albert preferential attachment, m new edges per node. Stored
// repeated endpoints make attachment probability proportional to degree.
inline void add_ba_graph(Graph& g, std::size_t first, std::size_t count, std::size_t m, Rng& rng) {
  if (count == 0) return;
  std::vector<std::size_t> endpoints;  // every edge endpoint, counted twice
  endpoints.push_back(0);              // seed node gets weight 1
  for (std::size_t v = 1; v < count; ++v) {
    std::set<std::size_t> targets;
    const std::size_t want = std::min(m, v);
    while (targets.size() < want) {
      const std::size_t pick = endpoints[uniform_index(rng, endpoints.size())];
      targets.insert(pick);
    }
    for (auto t : targets) {
      g.add_edge(first + v, first + t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
}

// Adds `count` random edges between currently non-adjacent node pairs.
inline void add_random_perturbation_edges(Graph& g, std::size_t count, Rng& rng) {
  const std::size_t max_edges = g.n * (g.n - 1) / 2;
  std::size_t added = 0;
  while (added < count && g.edge_count() < max_edges) {
    const std::size_t i = uniform_index(rng, g.n);
    const std::size_t j = uniform_index(rng, g.n);
    if (i == j || g.adj(i, j)) continue;
    g.add_edge(i, j);
    ++added;
  }
}

inline void set_constant_features(Graph& g, std::size_t dim, double value) {
  g.features = Matrix(g.n, dim, value);
}

// One-hot over degree buckets {1, 2, 3, >=4}.
inline void set_degree_bucket_features(Graph& g) {
  g.features = Matrix(g.n, 4);
  for (std::size_t v = 0; v < g.n; ++v) {
    const std::size_t d = g.degree(v);
    const std::size_t bucket = d == 0 ? 0 : std::min<std::size_t>(d, 4) - 1;
    g.features(v, bucket) = 1.0;
  }
}

struct TreeCyclesConfig {
  std::size_t num_graphs = 5000;
  std::size_t nodes_per_graph = 28;
  std::size_t num_cycles = 1;   // cycles attached per class-1 graph
  std::size_t cycle_size = 6;   // nodes per cycle motif
  std::uint64_t seed = 0;
};

// Class 0: random tree. Class 1: smaller random tree with cycle motifs
// bridged on by single edges. Constant f=1 features; balanced classes.
inline Dataset make_tree_cycles(const TreeCyclesConfig& cfg) {
  if (cfg.nodes_per_graph < 3) throw ConfigError("tree_cycles: need at least 3 nodes");
  if (cfg.cycle_size < 3) throw ConfigError("tree_cycles: cycle size must be >= 3");
  if (cfg.num_cycles < 1) throw ConfigError("tree_cycles: need at least one cycle");
  if (cfg.num_graphs < 2) throw ConfigError("tree_cycles: need at least 2 graphs");
  const std::size_t motif_nodes = cfg.num_cycles * cfg.cycle_size;
  if (cfg.nodes_per_graph <= motif_nodes)
    throw ConfigError("tree_cycles: nodes_per_graph too small for cycle motifs");

  Rng rng = make_rng(cfg.seed);
  Dataset d;
  d.num_classes = 2;
  d.feature_dim = 1;
  for (std::size_t k = 0; k < cfg.num_graphs; ++k) {
    const int label = static_cast<int>(k % 2);
    Graph g(cfg.nodes_per_graph, 1);
    if (label == 0) {
      add_random_tree(g, 0, cfg.nodes_per_graph, rng);
    } else {
      const std::size_t base = cfg.nodes_per_graph - motif_nodes;
      add_random_tree(g, 0, base, rng);
      std::size_t next = base;
      for (std::size_t c = 0; c < cfg.num_cycles; ++c) {
        for (std::size_t v = 0; v < cfg.cycle_size; ++v)
          g.add_edge(next + v, next + (v + 1) % cfg.cycle_size);
        g.add_edge(uniform_index(rng, base), next);
        next += cfg.cycle_size;
      }
    }
    set_constant_features(g, 1, 1.0);
    g.graph_label = label;
    d.graphs.push_back(std::move(g));
  }
  std::shuffle(d.graphs.begin(), d.graphs.end(), rng);
  d.make_split();
  return d;
}

struct BaShapesConfig {
  std::size_t num_graphs = 5000;
  std::size_t base_nodes = 29;      // BA base size for motif-bearing graphs
  std::size_t ba_m = 1;             // edges per new BA node
  std::size_t num_motifs = 7;       // house motifs per class-1 graph
  double perturb_fraction = 0.1;    // extra random edges as a fraction of n
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kHouseMotifNodes = 5;

// House motif: triangle roof on top of a square body, 5 nodes / 6 edges.
inline void add_house_motif(Graph& g, std::size_t first) {
  g.add_edge(first + 0, first + 1);  // roof-left wall
  g.add_edge(first + 0, first + 2);  // roof-right wall
  g.add_edge(first + 1, first + 2);  // ceiling
  g.add_edge(first + 1, first + 3);
  g.add_edge(first + 2, first + 4);
  g.add_edge(first + 3, first + 4);  // floor
}

// Class 1: BA base with house motifs attached by single edges. Class 0: a
// motif-free BA graph of the same total size. Both get 0.1*n random extra
// edges. Node labels mark motif membership; features are degree buckets.
inline Dataset make_ba_shapes(const BaShapesConfig& cfg) {
  if (cfg.base_nodes < 1) throw ConfigError("ba_shapes: base must have at least one node");
  if (cfg.num_motifs < 1) throw ConfigError("ba_shapes: need at least one motif");
  if (cfg.ba_m < 1) throw ConfigError("ba_shapes: ba_m must be >= 1");
  if (cfg.num_graphs < 2) throw ConfigError("ba_shapes: need at least 2 graphs");
  if (cfg.perturb_fraction < 0.0) throw ConfigError("ba_shapes: negative perturbation");

  const std::size_t total = cfg.base_nodes + cfg.num_motifs * kHouseMotifNodes;
  const auto n_perturb = static_cast<std::size_t>(cfg.perturb_fraction * static_cast<double>(total));

  Rng rng = make_rng(cfg.seed);
  Dataset d;
  d.num_classes = 2;
  d.feature_dim = 4;
  for (std::size_t k = 0; k < cfg.num_graphs; ++k) {
    const int label = static_cast<int>(k % 2);
    Graph g(total, 4);
    std::vector<int> node_labels(total, 0);
    if (label == 0) {
      add_ba_graph(g, 0, total, cfg.ba_m, rng);
    } else {
      add_ba_graph(g, 0, cfg.base_nodes, cfg.ba_m, rng);
      std::size_t next = cfg.base_nodes;
      for (std::size_t m = 0; m < cfg.num_motifs; ++m) {
        add_house_motif(g, next);
        g.add_edge(uniform_index(rng, cfg.base_nodes), next);
        for (std::size_t v = 0; v < kHouseMotifNodes; ++v) node_labels[next + v] = 1;
        next += kHouseMotifNodes;
      }
    }
    add_random_perturbation_edges(g, n_perturb, rng);
    set_degree_bucket_features(g);
    g.graph_label = label;
    g.node_labels = std::move(node_labels);
    d.graphs.push_back(std::move(g));
  }
  std::shuffle(d.graphs.begin(), d.graphs.end(), rng);
  d.make_split();
  return d;
}

struct TreeGridConfig {
  std::size_t num_graphs = 5000;
  std::size_t nodes_per_graph = 64;
  std::size_t grid_size = 3;   // g x g grid motif
  std::size_t num_grids = 1;
  std::uint64_t seed = 0;
};

// Class 0: random tree. Class 1: tree with g x g grid motifs bridged on.
inline Dataset make_tree_grid(const TreeGridConfig& cfg) {
  if (cfg.grid_size < 2) throw ConfigError("tree_grid: grid size must be >= 2");
  if (cfg.num_grids < 1) throw ConfigError("tree_grid: need at least one grid");
  if (cfg.num_graphs < 2) throw ConfigError("tree_grid: need at least 2 graphs");
  const std::size_t motif_nodes = cfg.num_grids * cfg.grid_size * cfg.grid_size;
  if (cfg.nodes_per_graph <= motif_nodes)
    throw ConfigError("tree_grid: nodes_per_graph too small for grid motifs");

  Rng rng = make_rng(cfg.seed);
  Dataset d;
  d.num_classes = 2;
  d.feature_dim = 1;
  for (std::size_t k = 0; k < cfg.num_graphs; ++k) {
    const int label = static_cast<int>(k % 2);
    Graph g(cfg.nodes_per_graph, 1);
    if (label == 0) {
      add_random_tree(g, 0, cfg.nodes_per_graph, rng);
    } else {
      const std::size_t base = cfg.nodes_per_graph - motif_nodes;
      add_random_tree(g, 0, base, rng);
      std::size_t next = base;
      const std::size_t gs = cfg.grid_size;
      for (std::size_t m = 0; m < cfg.num_grids; ++m) {
        for (std::size_t r = 0; r < gs; ++r)
          for (std::size_t c = 0; c < gs; ++c) {
            if (c + 1 < gs) g.add_edge(next + r * gs + c, next + r * gs + c + 1);
            if (r + 1 < gs) g.add_edge(next + r * gs + c, next + (r + 1) * gs + c);
          }
        g.add_edge(uniform_index(rng, base), next);
        next += gs * gs;
      }
    }
    set_constant_features(g, 1, 1.0);
    g.graph_label = label;
    d.graphs.push_back(std::move(g));
  }
  std::shuffle(d.graphs.begin(), d.graphs.end(), rng);
  d.make_split();
  return d;
}

}  // namespace xplore
