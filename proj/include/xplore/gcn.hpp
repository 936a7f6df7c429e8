#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "xplore/graph.hpp"
#include "xplore/matrix.hpp"

namespace xplore {

enum class Task { graph_classification, node_classification };
enum class Pooling { mean, sum };

inline std::string to_string(Task t) {
  return t == Task::graph_classification ? "graph_classification" : "node_classification";
}
inline std::string to_string(Pooling p) { return p == Pooling::mean ? "mean" : "sum"; }

struct ArchSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> conv_dims = {20, 20, 20};  // output width per conv layer
  std::vector<std::size_t> dense_dims = {};           // hidden dense widths; head to classes implied
  int num_classes = 2;
};

// Dense GCN oracle. Conv layers compute A_norm * H * W + b (per-channel
// bias, as in standard GCN implementations); dense layers carry biases too.
// ReLU after every conv layer and between dense hidden layers, none on the
// output logits.
struct GcnModel {
  ArchSpec arch;
  Task task = Task::graph_classification;
  Pooling pooling = Pooling::mean;
  std::vector<Matrix> conv_weights;               // in x out
  std::vector<std::vector<double>> conv_biases;   // out
  std::vector<Matrix> dense_weights;              // in x out
  std::vector<std::vector<double>> dense_biases;  // out

  int num_classes() const { return arch.num_classes; }

  void check_shapes() const {
    std::size_t d = arch.input_dim;
    if (conv_weights.size() != arch.conv_dims.size() ||
        conv_biases.size() != arch.conv_dims.size())
      throw ContractError("model: conv layer count mismatch");
    for (std::size_t l = 0; l < conv_weights.size(); ++l) {
      if (conv_weights[l].rows() != d || conv_weights[l].cols() != arch.conv_dims[l] ||
          conv_biases[l].size() != arch.conv_dims[l])
        throw ContractError("model: conv weight shape mismatch at layer " + std::to_string(l));
      d = arch.conv_dims[l];
    }
    std::vector<std::size_t> outs = arch.dense_dims;
    outs.push_back(static_cast<std::size_t>(arch.num_classes));
    if (dense_weights.size() != outs.size() || dense_biases.size() != outs.size())
      throw ContractError("model: dense layer count mismatch");
    for (std::size_t l = 0; l < outs.size(); ++l) {
      if (dense_weights[l].rows() != d || dense_weights[l].cols() != outs[l] ||
          dense_biases[l].size() != outs[l])
        throw ContractError("model: dense weight shape mismatch at layer " + std::to_string(l));
      d = outs[l];
    }
  }
};

// --- normalized adjacency -------------------------------------------------

// Spec-level dense operation: D^{-1/2} * A_hat * D^{-1/2} for a symmetric
// 0/1 matrix with unit diagonal (self-loops already added).
inline Matrix normalize_adjacency(const Matrix& a_hat) {
  const std::size_t n = a_hat.rows();
  if (a_hat.cols() != n) throw ContractError("normalize_adjacency: matrix not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (a_hat(i, i) != 1.0) throw ContractError("normalize_adjacency: diagonal must be ones");
    for (std::size_t j = i + 1; j < n; ++j)
      if (a_hat(i, j) != a_hat(j, i)) throw ContractError("normalize_adjacency: asymmetric input");
  }
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += a_hat(i, j);
    s[i] = 1.0 / std::sqrt(deg);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = s[i] * a_hat(i, j) * s[j];
  return out;
}

// Symmetric sparse operator for D^{-1/2} A_hat D^{-1/2} with per-entry
// values (1.0 for binary adjacencies, sigmoid values in the smooth
// surrogate). CSR layout with sorted columns keeps accumulation order
// deterministic, which makes oracle and explainer forwards bit-identical.
struct NormAdjOp {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;  // n + 1
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  std::vector<double> degree;        // row sums of a_hat
  std::vector<double> inv_sqrt_deg;  // s_i

  std::size_t nnz() const { return cols.size(); }

  void finalize_degrees() {
    degree.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) degree[i] += vals[k];
    inv_sqrt_deg.resize(n);
    for (std::size_t i = 0; i < n; ++i) inv_sqrt_deg[i] = 1.0 / std::sqrt(degree[i]);
  }

  // Z = diag(s) * A_hat * diag(s) * M
  Matrix apply(const Matrix& m) const {
    if (m.rows() != n) throw ContractError("NormAdjOp::apply: row count mismatch");
    Matrix z(n, m.cols());
    const std::size_t c = m.cols();
    for (std::size_t i = 0; i < n; ++i) {
      double* zi = z.row(i);
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        const double w = vals[k] * inv_sqrt_deg[cols[k]];
        const double* mj = m.row(cols[k]);
        for (std::size_t t = 0; t < c; ++t) zi[t] += w * mj[t];
      }
      const double si = inv_sqrt_deg[i];
      for (std::size_t t = 0; t < c; ++t) zi[t] *= si;
    }
    return z;
  }
};

// Operator for the oracle path: A + I.
inline NormAdjOp make_oracle_op(const Graph& g) {
  NormAdjOp op;
  op.n = g.n;
  op.offsets.assign(g.n + 1, 0);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      if (j == i || g.adj(i, j)) {
        op.cols.push_back(j);
        op.vals.push_back(1.0);
      }
    }
    op.offsets[i + 1] = op.cols.size();
  }
  op.finalize_degrees();
  return op;
}

// --- forward pass ----------------------------------------------------------

struct PipelineTrace {
  std::vector<Matrix> h;  // h[0] = input features, h[l+1] = relu(z[l])
  std::vector<Matrix> m;  // m[l] = h[l] * W_l
  std::vector<Matrix> z;  // z[l] = op(m[l])
  Matrix head_in;         // graph task: 1 x h (pooled); node task: alias of h.back()
  std::vector<Matrix> dense_pre;  // pre-activation per dense layer
  Matrix logits;                  // graph: 1 x C; node: n x C
};

inline void add_bias_rows(Matrix& m, const std::vector<double>& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += bias[j];
  }
}

// Runs conv stack + pooling + dense head over an arbitrary normalized
// adjacency operator and input features. Shared by oracle inference,
// training, and the perturbed explainer pipeline.
inline PipelineTrace run_pipeline(const GcnModel& model, const NormAdjOp& op, const Matrix& x) {
  if (x.cols() != model.arch.input_dim)
    throw ContractError("forward: feature dim " + std::to_string(x.cols()) +
                        " does not match model input dim " +
                        std::to_string(model.arch.input_dim));
  PipelineTrace t;
  t.h.push_back(x);
  for (std::size_t l = 0; l < model.conv_weights.size(); ++l) {
    t.m.push_back(matmul(t.h.back(), model.conv_weights[l]));
    Matrix z = op.apply(t.m.back());
    add_bias_rows(z, model.conv_biases[l]);
    t.z.push_back(std::move(z));
    Matrix h = t.z.back();
    relu_inplace(h);
    t.h.push_back(std::move(h));
  }
  const Matrix& hl = t.h.back();
  if (model.task == Task::graph_classification) {
    Matrix pooled(1, hl.cols());
    for (std::size_t i = 0; i < hl.rows(); ++i)
      for (std::size_t j = 0; j < hl.cols(); ++j) pooled(0, j) += hl(i, j);
    if (model.pooling == Pooling::mean && hl.rows() > 0)
      for (double& v : pooled.data()) v /= static_cast<double>(hl.rows());
    t.head_in = std::move(pooled);
  } else {
    t.head_in = hl;
  }
  Matrix a = t.head_in;
  for (std::size_t l = 0; l < model.dense_weights.size(); ++l) {
    Matrix pre = matmul(a, model.dense_weights[l]);
    add_bias_rows(pre, model.dense_biases[l]);
    t.dense_pre.push_back(pre);
    if (l + 1 < model.dense_weights.size()) relu_inplace(pre);
    a = std::move(pre);
  }
  t.logits = std::move(a);
  return t;
}

// Deterministic argmax: lowest class index wins ties.
inline int argmax_row(const Matrix& m, std::size_t row) {
  int best = 0;
  for (std::size_t c = 1; c < m.cols(); ++c)
    if (m(row, c) > m(row, best)) best = static_cast<int>(c);
  return best;
}

struct Prediction {
  Matrix logits;                // graph: 1 x C; node: n x C
  int graph_pred = -1;          // graph task only
  std::vector<int> node_preds;  // node task only
};

inline Prediction forward(const GcnModel& model, const Graph& g) {
  PipelineTrace t = run_pipeline(model, make_oracle_op(g), g.features);
  Prediction p;
  p.logits = std::move(t.logits);
  if (model.task == Task::graph_classification) {
    p.graph_pred = argmax_row(p.logits, 0);
  } else {
    p.node_preds.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) p.node_preds[i] = argmax_row(p.logits, i);
  }
  return p;
}

// --- loss utilities ---------------------------------------------------------

inline double log_sum_exp_row(const Matrix& logits, std::size_t row) {
  double mx = logits(row, 0);
  for (std::size_t c = 1; c < logits.cols(); ++c) mx = std::max(mx, logits(row, c));
  double s = 0.0;
  for (std::size_t c = 0; c < logits.cols(); ++c) s += std::exp(logits(row, c) - mx);
  return mx + std::log(s);
}

// -log softmax_target(logits_row)
inline double cross_entropy_row(const Matrix& logits, std::size_t row, int target) {
  return log_sum_exp_row(logits, row) - logits(row, static_cast<std::size_t>(target));
}

// d/dlogits of cross_entropy_row: softmax - onehot.
inline void cross_entropy_grad_row(const Matrix& logits, std::size_t row, int target,
                                   double scale, Matrix& grad_out) {
  const double lse = log_sum_exp_row(logits, row);
  for (std::size_t c = 0; c < logits.cols(); ++c)
    grad_out(row, c) += scale * std::exp(logits(row, c) - lse);
  grad_out(row, static_cast<std::size_t>(target)) -= scale;
}

}  // namespace xplore
