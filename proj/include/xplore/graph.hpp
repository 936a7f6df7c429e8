#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "xplore/errors.hpp"
#include "xplore/matrix.hpp"

namespace xplore {

// Attributed undirected graph over a fixed node set: symmetric binary
// adjacency with zero diagonal plus an n x f real feature matrix.
struct Graph {
  std::size_t n = 0;
  std::vector<std::uint8_t> adjacency;  // n*n row-major, 0/1
  Matrix features;                      // n x f
  std::optional<int> graph_label;
  std::optional<std::vector<int>> node_labels;

  Graph() = default;
  Graph(std::size_t nodes, std::size_t feature_dim)
      : n(nodes), adjacency(nodes * nodes, 0), features(nodes, feature_dim) {}

  std::uint8_t adj(std::size_t i, std::size_t j) const { return adjacency[i * n + j]; }

  void add_edge(std::size_t i, std::size_t j) {
    if (i == j) throw ContractError("add_edge: self loops are not representable");
    adjacency[i * n + j] = 1;
    adjacency[j * n + i] = 1;
  }

  void remove_edge(std::size_t i, std::size_t j) {
    adjacency[i * n + j] = 0;
    adjacency[j * n + i] = 0;
  }

  std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < n; ++j) d += adj(i, j);
    return d;
  }

  // Undirected edge count (each pair once).
  std::size_t edge_count() const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m += adj(i, j);
    return m;
  }

  // Upper-triangle edge list, i < j.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (adj(i, j)) out.emplace_back(i, j);
    return out;
  }

  bool operator==(const Graph& other) const {
    return n == other.n && adjacency == other.adjacency && features == other.features &&
           graph_label == other.graph_label && node_labels == other.node_labels;
  }

  void check_invariants() const {
    if (features.rows() != n) throw ContractError("graph: feature row count != n");
    if (features.cols() < 1) throw ContractError("graph: feature dim must be >= 1");
    for (std::size_t i = 0; i < n; ++i) {
      if (adj(i, i) != 0) throw ContractError("graph: nonzero diagonal");
      for (std::size_t j = i + 1; j < n; ++j)
        if (adj(i, j) != adj(j, i)) throw ContractError("graph: asymmetric adjacency");
    }
  }
};

// Iterative DFS cycle check on the undirected graph.
inline bool has_cycle(const Graph& g) {
  std::vector<int> state(g.n, 0);  // 0 unvisited, 1 done
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (node, parent)
  for (std::size_t root = 0; root < g.n; ++root) {
    if (state[root]) continue;
    stack.push_back({root, g.n});
    state[root] = 1;
    while (!stack.empty()) {
      auto [v, parent] = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < g.n; ++w) {
        if (!g.adj(v, w) || w == parent) continue;
        if (state[w]) return true;
        state[w] = 1;
        stack.push_back({w, v});
      }
    }
  }
  return false;
}

// Structural and feature difference between two graphs over the same node set.
struct EditBreakdown {
  std::size_t edges_added = 0;
  std::size_t edges_removed = 0;
  std::size_t features_changed = 0;
  std::size_t structural_ged = 0;
};

inline constexpr double kFeatureEditTolerance = 1e-9;

// Edge symmetric difference (each undirected edge once) plus the count of
// feature entries that moved beyond tolerance. Node sets must match: the
// explainer never adds or removes nodes.
inline EditBreakdown graph_edit_distance(const Graph& g, const Graph& h) {
  if (g.n != h.n) throw ContractError("graph_edit_distance: node counts differ");
  if (g.features.cols() != h.features.cols())
    throw ContractError("graph_edit_distance: feature dims differ");
  EditBreakdown out;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j) {
      if (g.adj(i, j) == h.adj(i, j)) continue;
      if (h.adj(i, j)) ++out.edges_added;
      else ++out.edges_removed;
    }
  for (std::size_t k = 0; k < g.features.size(); ++k)
    if (std::fabs(g.features.data()[k] - h.features.data()[k]) > kFeatureEditTolerance)
      ++out.features_changed;
  out.structural_ged = out.edges_added + out.edges_removed;
  return out;
}

// Ordered graph collection with a fixed 80/20 train/test split. The split is
// positional (first 80% of the stored order), so it survives serialization.
struct Dataset {
  std::vector<Graph> graphs;
  int num_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;

  void make_split() {
    train_idx.clear();
    test_idx.clear();
    const std::size_t cut = graphs.size() * 8 / 10;
    for (std::size_t i = 0; i < graphs.size(); ++i)
      (i < cut ? train_idx : test_idx).push_back(i);
  }

  void check_invariants() const {
    for (const Graph& g : graphs) {
      g.check_invariants();
      if (g.features.cols() != feature_dim)
        throw ContractError("dataset: inconsistent feature dim");
      if (g.graph_label && (*g.graph_label < 0 || *g.graph_label >= num_classes))
        throw ContractError("dataset: graph label out of range");
      if (g.node_labels)
        for (int lbl : *g.node_labels)
          if (lbl < 0 || lbl >= num_classes)
            throw ContractError("dataset: node label out of range");
    }
    if (train_idx.size() + test_idx.size() != graphs.size())
      throw ContractError("dataset: split does not cover all graphs");
  }

  bool operator==(const Dataset& other) const {
    return graphs == other.graphs && num_classes == other.num_classes &&
           feature_dim == other.feature_dim && train_idx == other.train_idx &&
           test_idx == other.test_idx;
  }
};

}  // namespace xplore
