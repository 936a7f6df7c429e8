#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "xplore/dataset_io.hpp"
#include "xplore/generators.hpp"

using namespace xplore;

namespace {
std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("dataset round-trips bit-exactly") {
  TreeCyclesConfig cfg;
  cfg.num_graphs = 24;
  cfg.nodes_per_graph = 10;
  cfg.cycle_size = 4;
  cfg.seed = 42;
  Dataset d = make_tree_cycles(cfg);
  // Exercise non-trivial feature values through the serializer.
  d.graphs[0].features(0, 0) = 0.1 + 0.2;  // not exactly representable
  d.graphs[1].features(2, 0) = -1.0 / 3.0;
  const std::string path = temp_path("xplore_ds_roundtrip.jsonl");
  save_dataset(d, path);
  const Dataset loaded = load_dataset(path);
  REQUIRE(loaded == d);
  std::remove(path.c_str());
}

TEST_CASE("node labels survive the round trip") {
  BaShapesConfig cfg;
  cfg.num_graphs = 6;
  cfg.seed = 1;
  const Dataset d = make_ba_shapes(cfg);
  const std::string path = temp_path("xplore_ds_nodes.jsonl");
  save_dataset(d, path);
  REQUIRE(load_dataset(path) == d);
  std::remove(path.c_str());
}

TEST_CASE("truncated record raises a schema error") {
  const std::string path = temp_path("xplore_ds_trunc.jsonl");
  {
    std::ofstream out(path);
    out << R"({"version":1,"n":2,"edges":[[0,1]],"feat)" << '\n';
  }
  REQUIRE_THROWS_AS(load_dataset(path), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("future schema version is rejected") {
  const std::string path = temp_path("xplore_ds_version.jsonl");
  {
    std::ofstream out(path);
    out << R"({"version":2,"n":1,"edges":[],"features":[[1.0]],"graph_label":0,"node_labels":null})"
        << '\n';
  }
  REQUIRE_THROWS_AS(load_dataset(path), SchemaError);
  std::remove(path.c_str());
}

TEST_CASE("missing file is an io error") {
  REQUIRE_THROWS_AS(load_dataset("/nonexistent/nowhere.jsonl"), IoError);
}

TEST_CASE("bad edge endpoints are rejected") {
  const std::string path = temp_path("xplore_ds_edges.jsonl");
  {
    std::ofstream out(path);
    out << R"({"version":1,"n":2,"edges":[[1,0]],"features":[[1.0],[1.0]],"graph_label":0,"node_labels":null})"
        << '\n';
  }
  REQUIRE_THROWS_AS(load_dataset(path), SchemaError);
  std::remove(path.c_str());
}
