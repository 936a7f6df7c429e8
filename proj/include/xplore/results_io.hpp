#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xplore/explain.hpp"
#include "xplore/graph.hpp"

namespace xplore {

inline constexpr int kResultsSchemaVersion = 1;

// FNV-1a over raw bytes; used to tie results files to the exact model /
// dataset / config they were produced from.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

inline std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("hash_file: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hash_hex(fnv1a64(bytes));
}

// One explained instance, as persisted to the results file.
struct ResultRow {
  std::size_t graph_id = 0;
  std::optional<std::size_t> target_node;  // node-task runs only
  bool found = false;
  int initial_pred = -1;
  int cf_pred = -1;
  std::size_t edges_added = 0;
  std::size_t edges_removed = 0;
  std::size_t features_changed = 0;
  double distance = 0.0;
  std::size_t oracle_calls = 0;
  double runtime_ms = 0.0;
  std::vector<std::array<std::size_t, 2>> cf_edges;     // populated when found
  std::vector<std::vector<double>> cf_features;         // populated when found
  std::vector<LossTraceRow> loss_trace;                 // optional
};

struct ResultsHeader {
  int version = kResultsSchemaVersion;
  std::string variant;
  std::string task;
  std::string config_hash;
  std::string model_hash;
  std::string dataset_hash;
};

inline ResultRow make_result_row(std::size_t graph_id, const CounterfactualResult& r,
                                 bool keep_loss_trace = false,
                                 std::optional<std::size_t> target_node = std::nullopt) {
  ResultRow row;
  row.graph_id = graph_id;
  row.target_node = target_node;
  row.found = r.found;
  row.initial_pred = r.initial_pred;
  row.cf_pred = r.counterfactual_pred;
  row.edges_added = r.edits.edges_added;
  row.edges_removed = r.edits.edges_removed;
  row.features_changed = r.edits.features_changed;
  row.distance = r.found ? r.best_distance : 0.0;
  row.oracle_calls = r.oracle_calls;
  row.runtime_ms = r.runtime_ms;
  if (r.found && r.best_graph) {
    for (auto [i, j] : r.best_graph->edges()) row.cf_edges.push_back({i, j});
    const Matrix& f = r.best_graph->features;
    row.cf_features.resize(f.rows());
    for (std::size_t i = 0; i < f.rows(); ++i)
      row.cf_features[i].assign(f.row(i), f.row(i) + f.cols());
  }
  if (keep_loss_trace) row.loss_trace = r.loss_trace;
  return row;
}

// Rebuilds the stored counterfactual graph over the original's node set.
inline Graph cf_graph_from_row(const ResultRow& row, const Graph& original) {
  if (!row.found) throw ContractError("cf_graph_from_row: instance has no counterfactual");
  Graph cf(original.n, original.features.cols());
  if (row.cf_features.size() != original.n)
    throw SchemaError("results row: counterfactual feature rows do not match node count");
  for (std::size_t i = 0; i < original.n; ++i) {
    if (row.cf_features[i].size() != cf.features.cols())
      throw SchemaError("results row: ragged counterfactual features");
    for (std::size_t c = 0; c < cf.features.cols(); ++c)
      cf.features(i, c) = row.cf_features[i][c];
  }
  for (const auto& e : row.cf_edges) {
    if (e[0] >= e[1] || e[1] >= original.n)
      throw SchemaError("results row: bad counterfactual edge");
    cf.add_edge(e[0], e[1]);
  }
  return cf;
}

inline nlohmann::json result_row_to_json(const ResultRow& r) {
  nlohmann::json j;
  j["graph_id"] = r.graph_id;
  if (r.target_node) j["target_node"] = *r.target_node;
  j["found"] = r.found;
  j["initial_pred"] = r.initial_pred;
  j["cf_pred"] = r.cf_pred;
  j["edges_added"] = r.edges_added;
  j["edges_removed"] = r.edges_removed;
  j["features_changed"] = r.features_changed;
  j["distance"] = r.distance;
  j["oracle_calls"] = r.oracle_calls;
  j["runtime_ms"] = r.runtime_ms;
  if (r.found) {
    j["cf_edges"] = r.cf_edges;
    j["cf_features"] = r.cf_features;
  }
  if (!r.loss_trace.empty()) {
    auto trace = nlohmann::json::array();
    for (const auto& row : r.loss_trace) trace.push_back({row.l_pred, row.l_dist, row.total});
    j["loss_trace"] = std::move(trace);
  }
  return j;
}

inline ResultRow result_row_from_json(const nlohmann::json& j) {
  ResultRow r;
  r.graph_id = j.at("graph_id").get<std::size_t>();
  if (j.contains("target_node")) r.target_node = j["target_node"].get<std::size_t>();
  r.found = j.at("found").get<bool>();
  r.initial_pred = j.at("initial_pred").get<int>();
  r.cf_pred = j.at("cf_pred").get<int>();
  r.edges_added = j.at("edges_added").get<std::size_t>();
  r.edges_removed = j.at("edges_removed").get<std::size_t>();
  r.features_changed = j.at("features_changed").get<std::size_t>();
  r.distance = j.at("distance").get<double>();
  r.oracle_calls = j.at("oracle_calls").get<std::size_t>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  if (j.contains("cf_edges"))
    r.cf_edges = j["cf_edges"].get<std::vector<std::array<std::size_t, 2>>>();
  if (j.contains("cf_features"))
    r.cf_features = j["cf_features"].get<std::vector<std::vector<double>>>();
  if (j.contains("loss_trace"))
    for (const auto& row : j["loss_trace"])
      r.loss_trace.push_back({row.at(0).get<double>(), row.at(1).get<double>(),
                              row.at(2).get<double>()});
  return r;
}

inline void save_results(const ResultsHeader& header, const std::vector<ResultRow>& rows,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_results: cannot open " + path);
  nlohmann::json h;
  h["version"] = header.version;
  h["variant"] = header.variant;
  h["task"] = header.task;
  h["config_hash"] = header.config_hash;
  h["model_hash"] = header.model_hash;
  h["dataset_hash"] = header.dataset_hash;
  out << h.dump() << '\n';
  for (const ResultRow& r : rows) out << result_row_to_json(r).dump() << '\n';
  if (!out) throw IoError("save_results: write failure on " + path);
}

inline std::pair<ResultsHeader, std::vector<ResultRow>> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_results: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("load_results: empty file " + path);
  ResultsHeader header;
  try {
    nlohmann::json h = nlohmann::json::parse(line);
    if (!h.contains("version") || h["version"].get<int>() != kResultsSchemaVersion)
      throw SchemaError("load_results: unsupported schema version in " + path);
    header.variant = h.at("variant").get<std::string>();
    header.task = h.at("task").get<std::string>();
    header.config_hash = h.at("config_hash").get<std::string>();
    header.model_hash = h.at("model_hash").get<std::string>();
    header.dataset_hash = h.at("dataset_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("load_results: bad header in " + path + ": " + e.what());
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      rows.push_back(result_row_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("load_results: " + path + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return {header, rows};
}

}  // namespace xplore
