#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "xplore/gcn.hpp"
#include "xplore/graph.hpp"
#include "xplore/rng.hpp"

namespace xplore {

struct TrainConfig {
  double learning_rate = 0.005;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double rms_decay = 0.99;  // RMSprop squared-gradient smoothing
  double rms_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const {
    if (learning_rate <= 0.0) throw ConfigError("train: learning_rate must be > 0");
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  }
};

struct TrainReport {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double final_loss = 0.0;
  std::size_t epochs_run = 0;
};

struct TrainedModel {
  GcnModel model;
  TrainReport report;
};

namespace detail {

inline Matrix glorot_init(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix w(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : w.data()) v = uniform(rng, -limit, limit);
  return w;
}

// RMSprop accumulator mirroring one parameter blob.
struct RmsState {
  std::vector<double> v;
  void step(std::vector<double>& w, const std::vector<double>& g, const TrainConfig& cfg) {
    if (v.empty()) v.assign(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = cfg.rms_decay * v[i] + (1.0 - cfg.rms_decay) * g[i] * g[i];
      w[i] -= cfg.learning_rate * g[i] / (std::sqrt(v[i]) + cfg.rms_eps);
    }
  }
};

struct WeightGrads {
  std::vector<Matrix> conv;
  std::vector<std::vector<double>> conv_bias;
  std::vector<Matrix> dense;
  std::vector<std::vector<double>> bias;

  static WeightGrads zeros_like(const GcnModel& m) {
    WeightGrads g;
    for (const auto& w : m.conv_weights) g.conv.emplace_back(w.rows(), w.cols());
    for (const auto& b : m.conv_biases) g.conv_bias.emplace_back(b.size(), 0.0);
    for (const auto& w : m.dense_weights) g.dense.emplace_back(w.rows(), w.cols());
    for (const auto& b : m.dense_biases) g.bias.emplace_back(b.size(), 0.0);
    return g;
  }
};

// Backprop of a scalar loss with upstream dlogits into the model weights.
// Returns nothing the explainer needs; this path only trains the oracle.
inline void accumulate_weight_grads(const GcnModel& model, const NormAdjOp& op,
                                    const PipelineTrace& t, Matrix dlogits, WeightGrads& grads) {
  // Dense head.
  Matrix g = std::move(dlogits);
  const std::size_t nd = model.dense_weights.size();
  for (std::size_t l = nd; l-- > 0;) {
    Matrix a_in = l == 0 ? t.head_in : t.dense_pre[l - 1];
    if (l > 0) relu_inplace(a_in);
    {
      Matrix dw = matmul_at_b(a_in, g);
      for (std::size_t k = 0; k < dw.size(); ++k) grads.dense[l].data()[k] += dw.data()[k];
    }
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) grads.bias[l][j] += g(i, j);
    g = matmul_a_bt(g, model.dense_weights[l]);
    if (l > 0) {
      const Matrix& pre = t.dense_pre[l - 1];
      for (std::size_t k = 0; k < g.size(); ++k)
        if (pre.data()[k] <= 0.0) g.data()[k] = 0.0;
    }
  }
  // Pooling.
  const std::size_t n = t.h.back().rows();
  Matrix dh(n, t.h.back().cols());
  if (model.task == Task::graph_classification) {
    const double scale = model.pooling == Pooling::mean ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dh.cols(); ++j) dh(i, j) = scale * g(0, j);
  } else {
    dh = std::move(g);
  }
  // Conv stack.
  for (std::size_t l = model.conv_weights.size(); l-- > 0;) {
    for (std::size_t k = 0; k < dh.size(); ++k)
      if (t.z[l].data()[k] <= 0.0) dh.data()[k] = 0.0;
    Matrix dm = op.apply(dh);  // normalized adjacency is symmetric
    {
      Matrix dw = matmul_at_b(t.h[l], dm);
      for (std::size_t k = 0; k < dw.size(); ++k) grads.conv[l].data()[k] += dw.data()[k];
    }
    if (l > 0) dh = matmul_a_bt(dm, model.conv_weights[l]);
  }
}

}  // namespace detail

inline GcnModel init_model(const ArchSpec& arch, Task task, Pooling pooling, std::uint64_t seed) {
  GcnModel m;
  m.arch = arch;
  m.task = task;
  m.pooling = pooling;
  std::size_t d = arch.input_dim;
  std::size_t layer = 0;
  for (std::size_t w : arch.conv_dims) {
    Rng rng = make_rng(mix_seed(seed, layer++));
    m.conv_weights.push_back(detail::glorot_init(d, w, rng));
    d = w;
  }
  std::vector<std::size_t> outs = arch.dense_dims;
  outs.push_back(static_cast<std::size_t>(arch.num_classes));
  for (std::size_t w : outs) {
    Rng rng = make_rng(mix_seed(seed, layer++));
    m.dense_weights.push_back(detail::glorot_init(d, w, rng));
    m.dense_biases.emplace_back(w, 0.0);
    d = w;
  }
  m.check_shapes();
  return m;
}

// Full-dataset RMSprop + cross-entropy training loop. Deterministic per
// seed: weight init, shuffling and batch order all derive from cfg.seed.
inline TrainedModel train(const Dataset& data, const ArchSpec& arch, Task task, Pooling pooling,
                          const TrainConfig& cfg) {
  cfg.validate();
  if (data.graphs.empty()) throw ContractError("train: dataset is empty");
  for (const Graph& g : data.graphs) {
    if (task == Task::graph_classification && !g.graph_label)
      throw ContractError("train: graph labels required for graph classification");
    if (task == Task::node_classification && !g.node_labels)
      throw ContractError("train: node labels required for node classification");
  }
  ArchSpec a = arch;
  a.input_dim = data.feature_dim;
  a.num_classes = data.num_classes;
  GcnModel model = init_model(a, task, pooling, mix_seed(cfg.seed, 0x11));

  // The adjacency operator of every graph is fixed; build once.
  std::vector<NormAdjOp> ops;
  ops.reserve(data.graphs.size());
  for (const Graph& g : data.graphs) ops.push_back(make_oracle_op(g));

  std::vector<std::size_t> order = data.train_idx;
  if (order.empty()) order.push_back(0);
  Rng shuffle_rng = make_rng(mix_seed(cfg.seed, 0x22));

  std::vector<detail::RmsState> rms_conv(model.conv_weights.size());
  std::vector<detail::RmsState> rms_dense(model.dense_weights.size());
  std::vector<detail::RmsState> rms_bias(model.dense_biases.size());

  double epoch_loss = 0.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      detail::WeightGrads grads = detail::WeightGrads::zeros_like(model);
      for (std::size_t b = start; b < stop; ++b) {
        const Graph& g = data.graphs[order[b]];
        PipelineTrace t = run_pipeline(model, ops[order[b]], g.features);
        Matrix dlogits(t.logits.rows(), t.logits.cols());
        if (task == Task::graph_classification) {
          epoch_loss += cross_entropy_row(t.logits, 0, *g.graph_label);
          cross_entropy_grad_row(t.logits, 0, *g.graph_label, inv_batch, dlogits);
        } else {
          const double inv_n = 1.0 / static_cast<double>(g.n);
          for (std::size_t v = 0; v < g.n; ++v) {
            epoch_loss += cross_entropy_row(t.logits, v, (*g.node_labels)[v]) * inv_n;
            cross_entropy_grad_row(t.logits, v, (*g.node_labels)[v], inv_batch * inv_n, dlogits);
          }
        }
        detail::accumulate_weight_grads(model, ops[order[b]], t, std::move(dlogits), grads);
      }
      for (std::size_t l = 0; l < model.conv_weights.size(); ++l)
        rms_conv[l].step(model.conv_weights[l].data(), grads.conv[l].data(), cfg);
      for (std::size_t l = 0; l < model.dense_weights.size(); ++l) {
        rms_dense[l].step(model.dense_weights[l].data(), grads.dense[l].data(), cfg);
        rms_bias[l].step(model.dense_biases[l], grads.bias[l], cfg);
      }
    }
    if (!std::isfinite(epoch_loss))
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
  }

  auto accuracy_over = [&](const std::vector<std::size_t>& idx) {
    if (idx.empty()) return 0.0;
    double correct = 0.0, total = 0.0;
    for (std::size_t i : idx) {
      const Graph& g = data.graphs[i];
      Prediction p = forward(model, g);
      if (task == Task::graph_classification) {
        correct += p.graph_pred == *g.graph_label ? 1.0 : 0.0;
        total += 1.0;
      } else {
        for (std::size_t v = 0; v < g.n; ++v) {
          correct += p.node_preds[v] == (*g.node_labels)[v] ? 1.0 : 0.0;
          total += 1.0;
        }
      }
    }
    return correct / total;
  };

  TrainedModel out;
  out.report.train_accuracy = accuracy_over(data.train_idx.empty() ? std::vector<std::size_t>{0}
                                                                   : data.train_idx);
  out.report.test_accuracy = accuracy_over(data.test_idx);
  out.report.final_loss = epoch_loss / std::max<std::size_t>(1, order.size());
  out.report.epochs_run = cfg.epochs;
  out.model = std::move(model);
  return out;
}

}  // namespace xplore
