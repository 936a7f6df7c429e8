#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "xplore/generators.hpp"
#include "xplore/model_io.hpp"
#include "xplore/train.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace xplore;

namespace {
Dataset one_graph_dataset() {
  Dataset d;
  Graph g = testutil::random_graph(6, 1, 0.5, 1, /*random_features=*/false);
  g.graph_label = 1;
  d.graphs.push_back(g);
  d.num_classes = 2;
  d.feature_dim = 1;
  d.train_idx = {0};
  return d;
}
}  // namespace

TEST_CASE("a single graph is memorized") {
  const Dataset d = one_graph_dataset();
  ArchSpec arch;
  arch.conv_dims = {8};
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.01;
  cfg.seed = 3;
  const TrainedModel tm = train(d, arch, Task::graph_classification, Pooling::mean, cfg);
  REQUIRE(tm.report.train_accuracy == 1.0);
}

TEST_CASE("training is deterministic per seed") {
  TreeCyclesConfig gen;
  gen.num_graphs = 60;
  gen.nodes_per_graph = 12;
  gen.cycle_size = 3;
  gen.seed = 11;
  const Dataset d = make_tree_cycles(gen);
  ArchSpec arch;
  arch.conv_dims = {8, 8};
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.seed = 5;
  const TrainedModel a = train(d, arch, Task::graph_classification, Pooling::mean, cfg);
  const TrainedModel b = train(d, arch, Task::graph_classification, Pooling::mean, cfg);
  for (std::size_t l = 0; l < a.model.conv_weights.size(); ++l)
    REQUIRE(a.model.conv_weights[l] == b.model.conv_weights[l]);
  for (std::size_t l = 0; l < a.model.dense_weights.size(); ++l)
    REQUIRE(a.model.dense_weights[l] == b.model.dense_weights[l]);
  REQUIRE(a.report.test_accuracy == b.report.test_accuracy);
}

TEST_CASE("small tree-cycles oracle separates the classes") {
  TreeCyclesConfig gen;
  gen.num_graphs = 200;
  gen.nodes_per_graph = 14;
  gen.cycle_size = 4;
  gen.seed = 23;
  const Dataset d = make_tree_cycles(gen);
  ArchSpec arch;  // default 3 conv + 1 dense
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learning_rate = 0.005;
  cfg.seed = 7;
  const TrainedModel tm = train(d, arch, Task::graph_classification, Pooling::mean, cfg);
  REQUIRE(tm.report.test_accuracy >= 0.9);
}

TEST_CASE("training errors on bad inputs") {
  Dataset empty;
  ArchSpec arch;
  REQUIRE_THROWS_AS(train(empty, arch, Task::graph_classification, Pooling::mean, TrainConfig{}),
                    ContractError);

  Dataset unlabeled = one_graph_dataset();
  unlabeled.graphs[0].graph_label.reset();
  REQUIRE_THROWS_AS(
      train(unlabeled, arch, Task::graph_classification, Pooling::mean, TrainConfig{}),
      ContractError);

  TrainConfig bad;
  bad.learning_rate = 0.0;
  REQUIRE_THROWS_AS(train(one_graph_dataset(), arch, Task::graph_classification, Pooling::mean,
                          bad),
                    ConfigError);
}

TEST_CASE("model save/load round-trips bit-exactly") {
  const Dataset d = one_graph_dataset();
  ArchSpec arch;
  arch.conv_dims = {6, 5};
  arch.dense_dims = {4};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 19;
  const TrainedModel tm = train(d, arch, Task::graph_classification, Pooling::sum, cfg);
  const std::string path =
      (std::filesystem::temp_directory_path() / "xplore_model_roundtrip.json").string();
  save_model(tm.model, path);
  const GcnModel loaded = load_model(path);
  REQUIRE(loaded.task == tm.model.task);
  REQUIRE(loaded.pooling == tm.model.pooling);
  REQUIRE(loaded.arch.conv_dims == tm.model.arch.conv_dims);
  for (std::size_t l = 0; l < loaded.conv_weights.size(); ++l)
    REQUIRE(loaded.conv_weights[l] == tm.model.conv_weights[l]);
  for (std::size_t l = 0; l < loaded.dense_weights.size(); ++l) {
    REQUIRE(loaded.dense_weights[l] == tm.model.dense_weights[l]);
    REQUIRE(loaded.dense_biases[l] == tm.model.dense_biases[l]);
  }
  // Identical predictions after reload.
  const Prediction a = forward(tm.model, d.graphs[0]);
  const Prediction b = forward(loaded, d.graphs[0]);
  REQUIRE(a.logits == b.logits);
  std::remove(path.c_str());
}

TEST_CASE("corrupted model file raises a schema error") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "xplore_model_corrupt.json").string();
  {
    std::ofstream out(path);
    out << "{\"version\": 1, \"task\": \"graph_cla";
  }
  REQUIRE_THROWS_AS(load_model(path), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("loading a model and evaluating the wrong feature dim is a contract error") {
  const Dataset d = one_graph_dataset();
  ArchSpec arch;
  arch.conv_dims = {4};
  TrainConfig cfg;
  cfg.epochs = 2;
  const TrainedModel tm = train(d, arch, Task::graph_classification, Pooling::mean, cfg);
  const Graph wrong = testutil::random_graph(5, 3, 0.5, 2);
  REQUIRE_THROWS_AS(forward(tm.model, wrong), ContractError);
}
