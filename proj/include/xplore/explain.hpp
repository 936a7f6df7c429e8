#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "xplore/gcn.hpp"
#include "xplore/grad.hpp"
#include "xplore/graph.hpp"
#include "xplore/rng.hpp"

namespace xplore {

struct ExplainerConfig {
  double alpha = 0.1;            // gradient step size
  double beta = 0.5;             // distance weight
  std::size_t iterations = 50;   // K
  double gamma_fill = 0.0;       // written into Gamma at non-edge positions
  double noise_std = 0.1;        // init noise std
  FeatureMode feature_mode = FeatureMode::free;
  bool allow_insertions = true;
  std::uint64_t seed = 0;
  double distance_norm = 1.0;    // p of the Lp distance
  double nonedge_shift = 0.0;    // >0: start non-edges at logit -shift
  bool record_loss_trace = true;

  void validate() const {
    if (alpha <= 0.0) throw ConfigError("explainer: alpha must be > 0");
    if (beta < 0.0) throw ConfigError("explainer: beta must be >= 0");
    if (iterations < 1) throw ConfigError("explainer: iterations must be >= 1");
    if (gamma_fill < -1.0 || gamma_fill > 1.0)
      throw ConfigError("explainer: gamma_fill must lie in [-1,1]");
    if (noise_std < 0.0) throw ConfigError("explainer: noise_std must be >= 0");
    if (distance_norm < 1.0) throw ConfigError("explainer: distance_norm must be >= 1");
  }
};

struct LossTraceRow {
  double l_pred = 0.0;
  double l_dist = 0.0;
  double total = 0.0;
};

struct CounterfactualResult {
  bool found = false;
  std::optional<Graph> best_graph;
  double best_distance = std::numeric_limits<double>::infinity();
  EditBreakdown edits;
  std::size_t oracle_calls = 0;   // candidate evaluations up to the first valid CF
  std::size_t iterations_run = 0;
  std::vector<LossTraceRow> loss_trace;
  int initial_pred = -1;
  int counterfactual_pred = -1;
  double pred_loss_at_init = 0.0;  // L_pred at the unperturbed graph
  std::vector<double> accepted_distance_trace;
  std::vector<double> iteration_micros;
  double runtime_ms = 0.0;
};

struct LossParts {
  double total = 0.0;
  double l_pred = 0.0;
  double l_dist = 0.0;
};

// Eq. 2/8/9 for single-label graph classification: the prediction loss is
// the negated cross-entropy of the candidate's logits against the original
// predicted class, active only while the two predictions still agree.
inline LossParts counterfactual_loss(const Graph& g, const Graph& cand, const Matrix& logits_g,
                                     const Matrix& logits_cand, double beta,
                                     double distance_norm = 1.0) {
  if (logits_g.cols() != logits_cand.cols())
    throw ContractError("counterfactual_loss: class counts differ");
  LossParts out;
  const int y = argmax_row(logits_g, 0);
  const int y_cand = argmax_row(logits_cand, 0);
  if (y == y_cand) out.l_pred = -cross_entropy_row(logits_cand, 0, y);
  Matrix a_prime(cand.n, cand.n);
  for (std::size_t i = 0; i < cand.n; ++i)
    for (std::size_t j = 0; j < cand.n; ++j) a_prime(i, j) = cand.adj(i, j);
  out.l_dist = distance_loss(g, a_prime, cand.features, distance_norm).value;
  out.total = out.l_pred + beta * out.l_dist;
  return out;
}

// Candidate distance used for the "closer CF" comparison: structural GED
// plus feature edit count (same units as the l1 distance loss).
inline double candidate_distance(const EditBreakdown& eb) {
  return static_cast<double>(eb.structural_ged + eb.features_changed);
}

namespace detail {

struct NodeObjective {
  std::size_t target = 0;
  double preserve_weight = 0.0;
  std::vector<int> original_preds;  // per-node predictions on the original graph
};

// Numerically stable BCE-with-logits, summed over one (logit, target) pair.
inline double bce_with_logits(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
}

// Soft label-preservation penalty over all non-target nodes (Eq. 8's
// multi-label form): mean BCE-with-logits against one-hot original preds.
inline double node_preserve_loss(const Matrix& logits, const NodeObjective& obj) {
  const std::size_t n = logits.rows();
  if (n <= 1) return 0.0;
  double acc = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    if (v == obj.target) continue;
    for (std::size_t c = 0; c < logits.cols(); ++c)
      acc += bce_with_logits(logits(v, c),
                             static_cast<int>(c) == obj.original_preds[v] ? 1.0 : 0.0);
  }
  return acc / (static_cast<double>(n - 1) * static_cast<double>(logits.cols()));
}

inline void node_preserve_grad(const Matrix& logits, const NodeObjective& obj, Matrix& dlogits) {
  const std::size_t n = logits.rows();
  if (n <= 1 || obj.preserve_weight == 0.0) return;
  const double scale =
      obj.preserve_weight / (static_cast<double>(n - 1) * static_cast<double>(logits.cols()));
  for (std::size_t v = 0; v < n; ++v) {
    if (v == obj.target) continue;
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      const double y = static_cast<int>(c) == obj.original_preds[v] ? 1.0 : 0.0;
      dlogits(v, c) += scale * (sigmoid(logits(v, c)) - y);
    }
  }
}

// Shared Algorithm-1 loop for graph-level and node-level explanation. The
// node objective, when present, redefines which row of the logits must flip
// and adds the preservation penalty.
inline CounterfactualResult run_search(const GcnModel& model, const Graph& g,
                                       const ExplainerConfig& cfg,
                                       const NodeObjective* node_obj) {
  cfg.validate();
  g.check_invariants();
  if (g.features.cols() != model.arch.input_dim)
    throw ContractError("explain: graph feature dim does not match model");
  model.check_shapes();

  const auto t_start = std::chrono::steady_clock::now();
  CounterfactualResult res;
  res.iterations_run = cfg.iterations;

  const Prediction orig = forward(model, g);
  const std::size_t pred_row = node_obj ? node_obj->target : 0;
  const int y = argmax_row(orig.logits, pred_row);
  res.initial_pred = y;
  res.pred_loss_at_init = -cross_entropy_row(orig.logits, pred_row, y);
  if (node_obj)
    res.pred_loss_at_init +=
        node_obj->preserve_weight * node_preserve_loss(orig.logits, *node_obj);

  Rng rng = make_rng(cfg.seed);
  PerturbationState state =
      make_initial_state(g, cfg.feature_mode, cfg.allow_insertions, cfg.gamma_fill,
                         cfg.noise_std, cfg.nonedge_shift, rng);

  std::size_t evals = 0;
  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    const auto it_start = std::chrono::steady_clock::now();
    ExplainerTrace trace = explainer_forward(model, g, state, EvalMode::hard_ste);
    ++evals;
    const int pred_cand = argmax_row(trace.pipe.logits, pred_row);
    const bool agree = pred_cand == y;
    if (!agree) {
      Graph cand = candidate_graph(g, trace);
      const EditBreakdown eb = graph_edit_distance(g, cand);
      const double d = candidate_distance(eb);
      if (!res.found) res.oracle_calls = evals;
      if (!res.found || d <= res.best_distance) {
        res.found = true;
        res.best_graph = std::move(cand);
        res.best_distance = d;
        res.edits = eb;
        res.counterfactual_pred = pred_cand;
      }
      res.accepted_distance_trace.push_back(res.best_distance);
    }

    const DistanceLoss dist =
        distance_loss(g, trace.a_prime, trace.x_pert, cfg.distance_norm);
    double l_pred = agree ? -cross_entropy_row(trace.pipe.logits, pred_row, y) : 0.0;
    if (node_obj)
      l_pred += node_obj->preserve_weight * node_preserve_loss(trace.pipe.logits, *node_obj);
    if (cfg.record_loss_trace)
      res.loss_trace.push_back({l_pred, dist.value, l_pred + cfg.beta * dist.value});

    Matrix dlogits(trace.pipe.logits.rows(), trace.pipe.logits.cols());
    if (agree) cross_entropy_grad_row(trace.pipe.logits, pred_row, y, -1.0, dlogits);
    if (node_obj) node_preserve_grad(trace.pipe.logits, *node_obj, dlogits);

    ExplainerGrads grads;
    bool have_pred_grads = false;
    for (double v : dlogits.data())
      if (v != 0.0) { have_pred_grads = true; break; }
    if (have_pred_grads) {
      grads = explainer_backward(model, g, state, trace, dlogits);
    } else {
      grads.p_bar = Matrix(g.n, g.n);
      grads.n_bar = Matrix(state.n_bar.rows(), state.n_bar.cols());
    }
    add_distance_gradients(g, state, trace, dist, cfg.beta, grads);
    apply_gradient_step(state, grads, cfg.alpha);

    res.iteration_micros.push_back(
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - it_start)
            .count());
  }
  if (!res.found) res.oracle_calls = evals;
  res.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

}  // namespace detail

// Algorithm 1: K fixed iterations, no early stopping; every accepted CF must
// beat (or tie) the best distance so far, and the best one is returned.
inline CounterfactualResult explain_graph(const GcnModel& model, const Graph& g,
                                          const ExplainerConfig& cfg) {
  if (model.task != Task::graph_classification)
    throw ContractError("explain_graph: model is not a graph classifier");
  return detail::run_search(model, g, cfg, nullptr);
}

// Node-level extension: perturbs the whole graph, flips the target node's
// prediction, and softly preserves every other node's predicted label.
inline CounterfactualResult explain_node(const GcnModel& model, const Graph& g,
                                         std::size_t target, const ExplainerConfig& cfg,
                                         double preserve_weight = 1.0) {
  if (model.task != Task::node_classification)
    throw ContractError("explain_node: model is not a node classifier");
  if (target >= g.n) throw ContractError("explain_node: target node out of range");
  if (preserve_weight < 0.0) throw ConfigError("explain_node: preserve_weight must be >= 0");
  detail::NodeObjective obj;
  obj.target = target;
  obj.preserve_weight = preserve_weight;
  obj.original_preds = forward(model, g).node_preds;
  return detail::run_search(model, g, cfg, &obj);
}

// CF-GNNExplainer semantics: only original edges may be dropped, features
// frozen. Gradients at never-present edges are exactly zero by construction.
inline CounterfactualResult baseline_deletion_only(const GcnModel& model, const Graph& g,
                                                   const ExplainerConfig& cfg) {
  ExplainerConfig c = cfg;
  c.allow_insertions = false;
  c.feature_mode = FeatureMode::none;
  return explain_graph(model, g, c);
}

inline CounterfactualResult baseline_deletion_only_node(const GcnModel& model, const Graph& g,
                                                        std::size_t target,
                                                        const ExplainerConfig& cfg,
                                                        double preserve_weight = 1.0) {
  ExplainerConfig c = cfg;
  c.allow_insertions = false;
  c.feature_mode = FeatureMode::none;
  return explain_node(model, g, target, c, preserve_weight);
}

// iRand baseline: t rounds of flipping each potential edge independently
// with probability p; the first prediction-flipping round wins.
inline CounterfactualResult baseline_irand(const GcnModel& model, const Graph& g,
                                           double flip_prob, std::size_t rounds,
                                           std::uint64_t seed) {
  if (flip_prob < 0.0 || flip_prob > 1.0)
    throw ConfigError("irand: flip probability must lie in [0,1]");
  if (rounds < 1) throw ConfigError("irand: need at least one round");
  if (model.task != Task::graph_classification)
    throw ContractError("irand: model is not a graph classifier");

  const auto t_start = std::chrono::steady_clock::now();
  CounterfactualResult res;
  res.iterations_run = rounds;
  const Prediction orig = forward(model, g);
  res.initial_pred = orig.graph_pred;
  res.pred_loss_at_init = -cross_entropy_row(orig.logits, 0, orig.graph_pred);

  Rng rng = make_rng(seed);
  for (std::size_t round = 0; round < rounds; ++round) {
    Graph cand = g;
    for (std::size_t i = 0; i < g.n; ++i)
      for (std::size_t j = i + 1; j < g.n; ++j)
        if (uniform(rng, 0.0, 1.0) < flip_prob) {
          if (cand.adj(i, j)) cand.remove_edge(i, j);
          else cand.add_edge(i, j);
        }
    cand.graph_label.reset();
    cand.node_labels.reset();
    const Prediction p = forward(model, cand);
    ++res.oracle_calls;
    if (p.graph_pred != orig.graph_pred) {
      res.found = true;
      res.edits = graph_edit_distance(g, cand);
      res.best_distance = candidate_distance(res.edits);
      res.accepted_distance_trace.push_back(res.best_distance);
      res.best_graph = std::move(cand);
      res.counterfactual_pred = p.graph_pred;
      break;
    }
  }
  res.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

// 1-D probe of the edge flip condition: insertion at 0 requires -g > beta,
// deletion at 1 requires g > beta (strict), given a large enough step. Also
// executes the projected step so the prediction can be compared to reality.
struct FlipProbe {
  bool predicted_flip = false;
  bool actual_flip = false;
  double stepped_value = 0.0;
};

inline FlipProbe flip_condition_probe(double grad, double beta, int current_value, double alpha) {
  if (current_value != 0 && current_value != 1)
    throw ContractError("flip_condition_probe: current value must be 0 or 1");
  FlipProbe out;
  // Hardest l1 subgradient at each boundary: +1 at 0, -1 at 1.
  const double d = current_value == 0 ? 1.0 : -1.0;
  const double unprojected = static_cast<double>(current_value) - alpha * (grad + beta * d);
  out.stepped_value = std::clamp(unprojected, 0.0, 1.0);
  if (current_value == 0) {
    out.predicted_flip = -grad > beta;
    out.actual_flip = unprojected >= 1.0;
  } else {
    out.predicted_flip = grad > beta;
    out.actual_flip = unprojected <= 0.0;
  }
  return out;
}

// Appendix A.3 bookkeeping check: for every traced iterate whose total loss
// does not exceed the loss at the unperturbed start, beta * ||theta -
// theta_0||_1 must be covered by the prediction-loss improvement. Returns
// the worst signed violation (<= 0 when the bound holds everywhere).
inline double l1_bound_violation(const CounterfactualResult& res, double beta) {
  const double l0 = res.pred_loss_at_init;  // distance term is zero at theta_0
  double worst = -std::numeric_limits<double>::infinity();
  for (const LossTraceRow& row : res.loss_trace) {
    if (row.total > l0) continue;
    worst = std::max(worst, beta * row.l_dist - (l0 - row.l_pred));
  }
  return worst;
}

}  // namespace xplore
