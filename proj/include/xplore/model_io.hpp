#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "xplore/gcn.hpp"

namespace xplore {

inline constexpr int kModelSchemaVersion = 1;

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows > 0 ? j.at(0).size() : 0;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) throw SchemaError("model file: ragged weight matrix");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

}  // namespace detail

inline void save_model(const GcnModel& model, const std::string& path) {
  nlohmann::json j;
  j["version"] = kModelSchemaVersion;
  j["task"] = to_string(model.task);
  j["pooling"] = to_string(model.pooling);
  j["arch"] = {{"input_dim", model.arch.input_dim},
               {"conv_dims", model.arch.conv_dims},
               {"dense_dims", model.arch.dense_dims},
               {"num_classes", model.arch.num_classes}};
  auto conv = nlohmann::json::array();
  for (const auto& w : model.conv_weights) conv.push_back(detail::matrix_to_json(w));
  auto dense = nlohmann::json::array();
  for (const auto& w : model.dense_weights) dense.push_back(detail::matrix_to_json(w));
  j["weights"] = {{"conv", std::move(conv)},
                  {"dense", std::move(dense)},
                  {"dense_biases", model.dense_biases}};
  std::ofstream out(path);
  if (!out) throw IoError("save_model: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("save_model: write failure on " + path);
}

inline GcnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_model: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("load_model: " + path + ": " + e.what());
  }
  try {
    if (!j.contains("version") || j["version"].get<int>() != kModelSchemaVersion)
      throw SchemaError("load_model: unsupported schema version in " + path);
    GcnModel m;
    const std::string task = j.at("task").get<std::string>();
    if (task == "graph_classification") m.task = Task::graph_classification;
    else if (task == "node_classification") m.task = Task::node_classification;
    else throw SchemaError("load_model: unknown task " + task);
    const std::string pooling = j.at("pooling").get<std::string>();
    if (pooling == "mean") m.pooling = Pooling::mean;
    else if (pooling == "sum") m.pooling = Pooling::sum;
    else throw SchemaError("load_model: unknown pooling " + pooling);
    m.arch.input_dim = j.at("arch").at("input_dim").get<std::size_t>();
    m.arch.conv_dims = j.at("arch").at("conv_dims").get<std::vector<std::size_t>>();
    m.arch.dense_dims = j.at("arch").at("dense_dims").get<std::vector<std::size_t>>();
    m.arch.num_classes = j.at("arch").at("num_classes").get<int>();
    for (const auto& w : j.at("weights").at("conv"))
      m.conv_weights.push_back(detail::matrix_from_json(w));
    for (const auto& w : j.at("weights").at("dense"))
      m.dense_weights.push_back(detail::matrix_from_json(w));
    m.dense_biases = j.at("weights").at("dense_biases").get<std::vector<std::vector<double>>>();
    m.check_shapes();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("load_model: " + path + ": " + e.what());
  }
}

}  // namespace xplore
