#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "test_helpers.hpp"
#include "xplore/gcn.hpp"

using namespace xplore;
using testutil::dense_reference_logits;
using testutil::oracle_adjacency_values;
using testutil::random_graph;
using testutil::random_model;

TEST_CASE("normalize_adjacency: two nodes, one edge, self-loops") {
  Matrix a(2, 2, 1.0);  // all ones = edge + self loops
  const Matrix norm = normalize_adjacency(a);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) REQUIRE(norm(i, j) == Catch::Approx(0.5));
}

TEST_CASE("normalize_adjacency: isolated node row is a unit basis vector") {
  Matrix a(3, 3);
  a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
  a(0, 1) = a(1, 0) = 1.0;  // node 2 isolated apart from its self-loop
  const Matrix norm = normalize_adjacency(a);
  REQUIRE(norm(2, 2) == 1.0);
  REQUIRE(norm(2, 0) == 0.0);
  REQUIRE(norm(2, 1) == 0.0);
}

TEST_CASE("normalize_adjacency matches direct dense computation on a random graph") {
  const Graph g = random_graph(8, 1, 0.4, 77);
  Matrix a(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) a(i, j) = i == j ? 1.0 : g.adj(i, j);
  const Matrix norm = normalize_adjacency(a);
  // Independent route: explicit degree vector and entrywise formula.
  for (std::size_t i = 0; i < 8; ++i) {
    double di = 0.0;
    for (std::size_t j = 0; j < 8; ++j) di += a(i, j);
    for (std::size_t j = 0; j < 8; ++j) {
      double dj = 0.0;
      for (std::size_t k = 0; k < 8; ++k) dj += a(j, k);
      REQUIRE(norm(i, j) == Catch::Approx(a(i, j) / std::sqrt(di * dj)).margin(1e-12));
    }
  }
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) REQUIRE(norm(i, j) == norm(j, i));
}

TEST_CASE("normalize_adjacency contract errors") {
  Matrix bad(2, 2, 1.0);
  bad(0, 1) = 0.0;  // asymmetric
  REQUIRE_THROWS_AS(normalize_adjacency(bad), ContractError);
  Matrix nodiag(2, 2, 0.0);
  REQUIRE_THROWS_AS(normalize_adjacency(nodiag), ContractError);
}

TEST_CASE("all-zero weights give uniform logits and class 0 by tie-break") {
  GcnModel m = random_model(2, {4}, {}, 3, Task::graph_classification, Pooling::mean, 1);
  for (auto& w : m.conv_weights) w = Matrix(w.rows(), w.cols());
  for (auto& w : m.dense_weights) w = Matrix(w.rows(), w.cols());
  const Graph g = random_graph(5, 2, 0.5, 5);
  const Prediction p = forward(m, g);
  for (std::size_t c = 0; c < 3; ++c) REQUIRE(p.logits(0, c) == 0.0);
  REQUIRE(p.graph_pred == 0);
}

TEST_CASE("forward matches the dense reference on random instances") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 5 + seed % 6;
    const Graph g = random_graph(n, 3, 0.45, 900 + seed);
    const GcnModel m = random_model(3, {7, 6}, {5}, 4, Task::graph_classification,
                                    seed % 2 ? Pooling::mean : Pooling::sum, 30 + seed);
    const Prediction p = forward(m, g);
    const auto ref = dense_reference_logits(m, g, g.features, oracle_adjacency_values(g));
    for (std::size_t c = 0; c < 4; ++c)
      REQUIRE(p.logits(0, c) == Catch::Approx(ref[0][c]).margin(1e-9));
  }
}

TEST_CASE("node-task forward matches the dense reference per node") {
  const Graph g = random_graph(7, 2, 0.4, 1234);
  const GcnModel m = random_model(2, {6, 6}, {}, 3, Task::node_classification, Pooling::mean, 9);
  const Prediction p = forward(m, g);
  const auto ref = dense_reference_logits(m, g, g.features, oracle_adjacency_values(g));
  for (std::size_t v = 0; v < 7; ++v)
    for (std::size_t c = 0; c < 3; ++c)
      REQUIRE(p.logits(v, c) == Catch::Approx(ref[v][c]).margin(1e-9));
}

TEST_CASE("permutation equivariance") {
  const Graph g = random_graph(8, 2, 0.45, 321);
  const GcnModel graph_model =
      random_model(2, {5, 5}, {}, 3, Task::graph_classification, Pooling::mean, 17);
  const GcnModel node_model =
      random_model(2, {5, 5}, {}, 3, Task::node_classification, Pooling::mean, 17);

  std::vector<std::size_t> perm(g.n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(99);
  std::shuffle(perm.begin(), perm.end(), rng);

  Graph pg(g.n, 2);
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j)
      if (i != j && g.adj(i, j)) pg.adjacency[perm[i] * g.n + perm[j]] = 1;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t c = 0; c < 2; ++c) pg.features(perm[i], c) = g.features(i, c);

  const Prediction orig_graph = forward(graph_model, g);
  const Prediction perm_graph = forward(graph_model, pg);
  for (std::size_t c = 0; c < 3; ++c)
    REQUIRE(orig_graph.logits(0, c) == Catch::Approx(perm_graph.logits(0, c)).margin(1e-9));

  const Prediction orig_node = forward(node_model, g);
  const Prediction perm_node = forward(node_model, pg);
  for (std::size_t v = 0; v < g.n; ++v)
    for (std::size_t c = 0; c < 3; ++c)
      REQUIRE(orig_node.logits(v, c) ==
              Catch::Approx(perm_node.logits(perm[v], c)).margin(1e-9));
}

TEST_CASE("isolated zero-feature node: sum pooling unchanged, mean rescaled") {
  const Graph g = random_graph(6, 2, 0.5, 888);
  Graph g_plus(7, 2);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) g_plus.adjacency[i * 7 + j] = g.adj(i, j);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t c = 0; c < 2; ++c) g_plus.features(i, c) = g.features(i, c);
  // node 6: isolated, zero features

  const GcnModel sum_model =
      random_model(2, {5}, {}, 2, Task::graph_classification, Pooling::sum, 4);
  const Prediction a = forward(sum_model, g);
  const Prediction b = forward(sum_model, g_plus);
  for (std::size_t c = 0; c < 2; ++c)
    REQUIRE(a.logits(0, c) == Catch::Approx(b.logits(0, c)).margin(1e-9));

  GcnModel mean_model = sum_model;
  mean_model.pooling = Pooling::mean;
  // With biases zero, mean-pooled logits shrink by exactly n/(n+1).
  const Prediction c6 = forward(mean_model, g);
  const Prediction c7 = forward(mean_model, g_plus);
  for (std::size_t c = 0; c < 2; ++c)
    REQUIRE(c7.logits(0, c) == Catch::Approx(c6.logits(0, c) * 6.0 / 7.0).margin(1e-9));
}

TEST_CASE("feature dimension mismatch is a contract error") {
  const GcnModel m = random_model(3, {4}, {}, 2, Task::graph_classification, Pooling::mean, 2);
  const Graph g = random_graph(4, 2, 0.5, 6);
  REQUIRE_THROWS_AS(forward(m, g), ContractError);
}
