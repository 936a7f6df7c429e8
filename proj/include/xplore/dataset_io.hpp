#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "xplore/graph.hpp"

namespace xplore {

inline constexpr int kDatasetSchemaVersion = 1;

inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["version"] = kDatasetSchemaVersion;
  j["n"] = g.n;
  auto edges = nlohmann::json::array();
  for (auto [a, b] : g.edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  auto feats = nlohmann::json::array();
  for (std::size_t i = 0; i < g.n; ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t c = 0; c < g.features.cols(); ++c) row.push_back(g.features(i, c));
    feats.push_back(std::move(row));
  }
  j["features"] = std::move(feats);
  j["graph_label"] = g.graph_label ? nlohmann::json(*g.graph_label) : nlohmann::json(nullptr);
  j["node_labels"] = g.node_labels ? nlohmann::json(*g.node_labels) : nlohmann::json(nullptr);
  return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || !j["version"].is_number_integer())
    throw SchemaError("dataset record: missing schema version");
  if (j["version"].get<int>() != kDatasetSchemaVersion)
    throw SchemaError("dataset record: unsupported schema version " +
                      std::to_string(j["version"].get<int>()));
  const auto n = j.at("n").get<std::size_t>();
  const auto& feats = j.at("features");
  if (feats.size() != n) throw SchemaError("dataset record: feature row count != n");
  const std::size_t f = n > 0 ? feats.at(0).size() : 0;
  Graph g(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = feats.at(i);
    if (row.size() != f) throw SchemaError("dataset record: ragged feature rows");
    for (std::size_t c = 0; c < f; ++c) g.features(i, c) = row.at(c).get<double>();
  }
  for (const auto& e : j.at("edges")) {
    const auto a = e.at(0).get<std::size_t>();
    const auto b = e.at(1).get<std::size_t>();
    if (a >= b || b >= n) throw SchemaError("dataset record: bad edge endpoints");
    g.add_edge(a, b);
  }
  if (!j.at("graph_label").is_null()) g.graph_label = j["graph_label"].get<int>();
  if (!j.at("node_labels").is_null()) g.node_labels = j["node_labels"].get<std::vector<int>>();
  return g;
}

// One JSON record per line, streamable and diffable. The 80/20 split is
// positional, so writing preserves it implicitly.
inline void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_dataset: cannot open " + path);
  for (const Graph& g : d.graphs) out << graph_to_json(g).dump() << '\n';
  if (!out) throw IoError("save_dataset: write failure on " + path);
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_dataset: cannot open " + path);
  Dataset d;
  std::string line;
  std::size_t lineno = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("load_dataset: " + path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      d.graphs.push_back(graph_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("load_dataset: " + path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const Graph& g = d.graphs.back();
    if (g.graph_label) max_label = std::max(max_label, *g.graph_label);
    if (g.node_labels)
      for (int lbl : *g.node_labels) max_label = std::max(max_label, lbl);
  }
  if (d.graphs.empty()) throw SchemaError("load_dataset: no records in " + path);
  d.feature_dim = d.graphs.front().features.cols();
  d.num_classes = max_label + 1;
  d.make_split();
  d.check_invariants();
  return d;
}

}  // namespace xplore
