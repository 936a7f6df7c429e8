#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "xplore/gcn.hpp"
#include "xplore/graph.hpp"
#include "xplore/rng.hpp"

namespace xplore {

enum class FeatureMode { none, gate, free };

// How the edge threshold and feature gate are evaluated/differentiated.
//   hard_ste:       binary forward, straight-through (identity) backward.
//   smooth_sigmoid: sigmoid in place of the threshold; exact gradients.
//                   Exists for finite-difference validation only.
//   identity:       raw values pass through the "threshold"; used to check
//                   that the STE gradient equals the identity-substituted
//                   pipeline's gradient at binary-valued parameters.
enum class EvalMode { hard_ste, smooth_sigmoid, identity };

// Optimization variables of the explainer: symmetric edge logits P_bar and
// feature multipliers N_bar, plus the Gamma prior captured at init time.
struct PerturbationState {
  std::size_t n = 0;
  std::size_t f = 0;
  Matrix p_bar;   // n x n, kept symmetric (upper triangle mirrored)
  Matrix n_bar;   // n x f
  Matrix gamma;   // n x n, entries in [-1, 1]
  FeatureMode feature_mode = FeatureMode::none;
  bool allow_insertions = true;

  void check_invariants() const {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (p_bar(i, j) != p_bar(j, i)) throw ContractError("state: p_bar not symmetric");
        if (gamma(i, j) < -1.0 || gamma(i, j) > 1.0)
          throw ContractError("state: gamma entry outside [-1,1]");
      }
  }
};

// Algorithm-1 initialization: P_bar <- A + noise + Gamma, N_bar <- 1.
// Noise is drawn on the upper triangle and mirrored so P_bar starts
// symmetric. Non-edges sit at logit ~0 (the sigma(0)=0.5 boundary);
// `nonedge_shift` > 0 moves them to logit -shift for sparse starts.
inline PerturbationState make_initial_state(const Graph& g, FeatureMode feature_mode,
                                            bool allow_insertions, double gamma_fill,
                                            double noise_std, double nonedge_shift, Rng& rng) {
  if (gamma_fill < -1.0 || gamma_fill > 1.0)
    throw ConfigError("gamma_fill must lie in [-1, 1]");
  PerturbationState s;
  s.n = g.n;
  s.f = g.features.cols();
  s.p_bar = Matrix(g.n, g.n);
  s.gamma = Matrix(g.n, g.n);
  s.n_bar = Matrix(g.n, s.f, 1.0);
  s.feature_mode = feature_mode;
  s.allow_insertions = allow_insertions;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j) {
      const bool edge = g.adj(i, j) != 0;
      if (!edge) {
        s.gamma(i, j) = gamma_fill;
        s.gamma(j, i) = gamma_fill;
      }
      const double noise = noise_std > 0.0 ? gaussian(rng, 0.0, noise_std) : 0.0;
      double v = (edge ? 1.0 : 0.0) + noise + s.gamma(i, j);
      if (!edge) v -= nonedge_shift;
      s.p_bar(i, j) = v;
      s.p_bar(j, i) = v;
    }
  return s;
}

// T_0.5 threshold: entry is an edge iff sigmoid(p_bar) >= 0.5, i.e. p_bar >= 0.
// Ties resolve to edge-present. Returns (a_hat with unit diagonal, p_binary).
inline std::pair<Matrix, Matrix> binarize_edges(const Matrix& p_bar) {
  const std::size_t n = p_bar.rows();
  Matrix p_binary(n, n);
  Matrix a_hat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double b = p_bar(i, j) >= 0.0 ? 1.0 : 0.0;
      p_binary(i, j) = b;
      a_hat(i, j) = i == j ? 1.0 : b;
    }
  return {std::move(a_hat), std::move(p_binary)};
}

// Feature perturbation: gate masks entries (threshold at sigma(N_bar) >= 0.5),
// free scales them, none passes X through untouched.
inline Matrix apply_feature_mode(const Matrix& n_bar, const Matrix& x, FeatureMode mode) {
  if (mode == FeatureMode::none) return x;
  if (n_bar.rows() != x.rows() || n_bar.cols() != x.cols())
    throw ContractError("apply_feature_mode: shape mismatch");
  Matrix out = x;
  if (mode == FeatureMode::gate) {
    for (std::size_t k = 0; k < out.size(); ++k)
      if (n_bar.data()[k] < 0.0) out.data()[k] = 0.0;
  } else {
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] *= n_bar.data()[k];
  }
  return out;
}

// Everything backward needs from a perturbed forward evaluation.
struct ExplainerTrace {
  EvalMode mode = EvalMode::hard_ste;
  Matrix a_prime;  // candidate adjacency values, zero diagonal
  NormAdjOp op;    // normalized max(threshold(P_bar), I) operator
  Matrix x_pert;
  PipelineTrace pipe;
};

namespace detail {

// Candidate adjacency entry value and its derivative w.r.t. p_bar under the
// given evaluation mode, with deletion-only masking folded in.
inline double edge_value(double p, EvalMode mode) {
  switch (mode) {
    case EvalMode::hard_ste: return p >= 0.0 ? 1.0 : 0.0;
    case EvalMode::smooth_sigmoid: return sigmoid(p);
    default: return p;
  }
}

inline double edge_deriv(double p, EvalMode mode) {
  if (mode == EvalMode::smooth_sigmoid) {
    const double s = sigmoid(p);
    return s * (1.0 - s);
  }
  return 1.0;  // straight-through / identity
}

}  // namespace detail

// Evaluates the perturbed pipeline S[D^-1/2 A_hat D^-1/2 (X o N) W ...].
// In hard mode the operator is bit-identical to the oracle's when the
// binarized edges reproduce A, so the identity perturbation returns the
// oracle's logits exactly.
inline ExplainerTrace explainer_forward(const GcnModel& model, const Graph& g,
                                        const PerturbationState& state,
                                        EvalMode mode = EvalMode::hard_ste) {
  if (state.n != g.n || state.f != g.features.cols())
    throw ContractError("explainer_forward: state/graph dimensions disagree");
  ExplainerTrace t;
  t.mode = mode;
  t.a_prime = Matrix(g.n, g.n);
  t.op.n = g.n;
  t.op.offsets.assign(g.n + 1, 0);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < g.n; ++j) {
      if (j == i) {
        t.op.cols.push_back(j);  // self-loop pinned to 1 by max(T(P_bar), I)
        t.op.vals.push_back(1.0);
        continue;
      }
      double v = detail::edge_value(state.p_bar(i, j), mode);
      if (!state.allow_insertions && !g.adj(i, j)) v = 0.0;
      t.a_prime(i, j) = v;
      if (v != 0.0) {
        t.op.cols.push_back(j);
        t.op.vals.push_back(v);
      }
    }
    t.op.offsets[i + 1] = t.op.cols.size();
  }
  t.op.finalize_degrees();

  if (state.feature_mode == FeatureMode::none) {
    t.x_pert = g.features;
  } else if (state.feature_mode == FeatureMode::free || mode == EvalMode::identity) {
    t.x_pert = g.features;
    for (std::size_t k = 0; k < t.x_pert.size(); ++k)
      t.x_pert.data()[k] *= state.n_bar.data()[k];
  } else if (mode == EvalMode::smooth_sigmoid) {
    t.x_pert = g.features;
    for (std::size_t k = 0; k < t.x_pert.size(); ++k)
      t.x_pert.data()[k] *= sigmoid(state.n_bar.data()[k]);
  } else {
    t.x_pert = apply_feature_mode(state.n_bar, g.features, FeatureMode::gate);
  }

  t.pipe = run_pipeline(model, t.op, t.x_pert);
  return t;
}

// Hard-mode candidate graph: thresholded edges (zero diagonal) + perturbed
// features. Labels are deliberately left unset.
inline Graph candidate_graph(const Graph& g, const ExplainerTrace& t) {
  Graph cand(g.n, t.x_pert.cols());
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j)
      if (t.a_prime(i, j) != 0.0) cand.add_edge(i, j);
  cand.features = t.x_pert;
  return cand;
}

struct ExplainerGrads {
  Matrix p_bar;  // symmetric: entry (i,j) holds dL/du_ij of the mirrored param
  Matrix n_bar;
};

// Reverse pass from an upstream gradient at the logits down to P_bar and
// N_bar. Thresholds pass gradients straight through (hard mode); the exact
// sigmoid chain rule applies in smooth mode. Gradients of mirrored entries
// are summed into each undirected parameter, and deletion-only semantics
// zero every entry that was never an edge in A.
inline ExplainerGrads explainer_backward(const GcnModel& model, const Graph& g,
                                         const PerturbationState& state,
                                         const ExplainerTrace& trace, const Matrix& dlogits) {
  const std::size_t n = g.n;
  if (trace.pipe.logits.rows() != dlogits.rows() || trace.pipe.logits.cols() != dlogits.cols())
    throw ContractError("explainer_backward: upstream gradient shape mismatch");
  if (trace.pipe.h.empty() || trace.pipe.h.front().rows() != n)
    throw ContractError("explainer_backward: trace does not match this graph");

  // Dense head, back to its input.
  Matrix gback = dlogits;
  for (std::size_t l = model.dense_weights.size(); l-- > 0;) {
    gback = matmul_a_bt(gback, model.dense_weights[l]);
    if (l > 0) {
      const Matrix& pre = trace.pipe.dense_pre[l - 1];
      for (std::size_t k = 0; k < gback.size(); ++k)
        if (pre.data()[k] <= 0.0) gback.data()[k] = 0.0;
    }
  }
  // Pooling.
  const std::size_t hl_cols = trace.pipe.h.back().cols();
  Matrix dh(n, hl_cols);
  if (model.task == Task::graph_classification) {
    const double scale = model.pooling == Pooling::mean ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < hl_cols; ++j) dh(i, j) = scale * gback(0, j);
  } else {
    dh = std::move(gback);
  }

  // Conv stack. grad_Ahat decomposes into a rank-h product U V^T plus
  // row/column corrections from the degree normalization:
  //   dL/dA_kl = sum_c U[k,c] V[l,c] - a[k] - b[l].
  const std::size_t layers = model.conv_weights.size();
  std::size_t total_h = 0;
  for (std::size_t l = 0; l < layers; ++l) total_h += model.arch.conv_dims[l];
  Matrix u(n, total_h), v(n, total_h);
  std::vector<double> avec(n, 0.0), bvec(n, 0.0);
  const std::vector<double>& s = trace.op.inv_sqrt_deg;
  const std::vector<double>& deg = trace.op.degree;

  Matrix gx;  // gradient w.r.t. perturbed input features
  std::size_t col_off = total_h;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t h = model.arch.conv_dims[l];
    col_off -= h;
    Matrix gz = dh;
    for (std::size_t k = 0; k < gz.size(); ++k)
      if (trace.pipe.z[l].data()[k] <= 0.0) gz.data()[k] = 0.0;

    const Matrix& m = trace.pipe.m[l];
    const Matrix& z = trace.pipe.z[l];
    const std::vector<double>& bias = model.conv_biases[l];
    Matrix gm = trace.op.apply(gz);
    for (std::size_t k = 0; k < n; ++k) {
      const double corr = 0.5 / (deg[k] * std::sqrt(deg[k]));
      double r = 0.0, c = 0.0;
      for (std::size_t t = 0; t < h; ++t) {
        r += gz(k, t) * (z(k, t) - bias[t]);  // z minus bias = s_k * (A_hat s M)_k
        c += m(k, t) * gm(k, t);
        u(k, col_off + t) = s[k] * gz(k, t);
        v(k, col_off + t) = s[k] * m(k, t);
      }
      avec[k] += corr * r / s[k];
      bvec[k] += corr * c / s[k];
    }
    if (l > 0) dh = matmul_a_bt(gm, model.conv_weights[l]);
    else gx = matmul_a_bt(gm, model.conv_weights[0]);
  }

  ExplainerGrads grads;
  grads.p_bar = Matrix(n, n);
  const bool deletion_only = !state.allow_insertions;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (deletion_only && !g.adj(i, j)) continue;  // exactly zero, never updated
      const double* ui = u.row(i);
      const double* vj = v.row(j);
      const double* uj = u.row(j);
      const double* vi = v.row(i);
      double gij = 0.0, gji = 0.0;
      for (std::size_t t = 0; t < total_h; ++t) {
        gij += ui[t] * vj[t];
        gji += uj[t] * vi[t];
      }
      gij -= avec[i] + bvec[j];
      gji -= avec[j] + bvec[i];
      const double folded =
          (gij + gji) *
          (detail::edge_deriv(state.p_bar(i, j), trace.mode));
      grads.p_bar(i, j) = folded;
      grads.p_bar(j, i) = folded;
    }

  grads.n_bar = Matrix(state.n_bar.rows(), state.n_bar.cols());
  if (state.feature_mode != FeatureMode::none) {
    for (std::size_t k = 0; k < grads.n_bar.size(); ++k) {
      double d = gx.data()[k] * g.features.data()[k];
      if (state.feature_mode == FeatureMode::gate && trace.mode == EvalMode::smooth_sigmoid) {
        const double sg = sigmoid(state.n_bar.data()[k]);
        d *= sg * (1.0 - sg);
      }
      grads.n_bar.data()[k] = d;
    }
  }
  return grads;
}

// --- distance loss (Eq. 9) --------------------------------------------------

struct DistanceLoss {
  double value = 0.0;
  // Gradient factors d(l_dist)/d(A'_ij) on the upper triangle and
  // d(l_dist)/d(X'_ij); chained into P_bar / N_bar by the caller.
  Matrix d_aprime;
  Matrix d_xprime;
};

// ||A - A'||_p over the upper triangle + ||X - X'||_p elementwise.
inline DistanceLoss distance_loss(const Graph& g, const Matrix& a_prime, const Matrix& x_pert,
                                  double norm_p) {
  const std::size_t n = g.n;
  DistanceLoss out;
  out.d_aprime = Matrix(n, n);
  out.d_xprime = Matrix(x_pert.rows(), x_pert.cols());

  auto norm_and_grads = [&](auto value_at, auto grad_out, std::size_t count) {
    double norm = 0.0;
    if (norm_p == 1.0) {
      for (std::size_t k = 0; k < count; ++k) norm += std::fabs(value_at(k));
      for (std::size_t k = 0; k < count; ++k) {
        const double d = value_at(k);
        grad_out(k, d > 0.0 ? -1.0 : (d < 0.0 ? 1.0 : 0.0));
      }
      return norm;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += std::pow(std::fabs(value_at(k)), norm_p);
    norm = std::pow(acc, 1.0 / norm_p);
    if (norm > 0.0) {
      const double denom = std::pow(norm, norm_p - 1.0);
      for (std::size_t k = 0; k < count; ++k) {
        const double d = value_at(k);
        if (d == 0.0) continue;
        const double mag = std::pow(std::fabs(d), norm_p - 1.0);
        grad_out(k, -(d > 0.0 ? mag : -mag) / denom);
      }
    }
    return norm;
  };

  // Adjacency part; index k enumerates the upper triangle.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  out.value += norm_and_grads(
      [&](std::size_t k) {
        auto [i, j] = pairs[k];
        return static_cast<double>(g.adj(i, j)) - a_prime(i, j);
      },
      [&](std::size_t k, double grad) {
        auto [i, j] = pairs[k];
        out.d_aprime(i, j) = grad;
      },
      pairs.size());

  // Feature part.
  out.value += norm_and_grads(
      [&](std::size_t k) { return g.features.data()[k] - x_pert.data()[k]; },
      [&](std::size_t k, double grad) { out.d_xprime.data()[k] = grad; },
      x_pert.size());
  return out;
}

// Applies one plain gradient-descent step, keeping P_bar symmetric and
// leaving N_bar untouched when features are frozen.
inline void apply_gradient_step(PerturbationState& state, const ExplainerGrads& grads,
                                double alpha) {
  for (std::size_t k = 0; k < state.p_bar.size(); ++k)
    state.p_bar.data()[k] -= alpha * grads.p_bar.data()[k];
  if (state.feature_mode != FeatureMode::none)
    for (std::size_t k = 0; k < state.n_bar.size(); ++k)
      state.n_bar.data()[k] -= alpha * grads.n_bar.data()[k];
}

// Adds the beta-weighted distance-path gradients into grads, chaining
// through the threshold (STE or sigmoid) and the feature mode.
inline void add_distance_gradients(const Graph& g, const PerturbationState& state,
                                   const ExplainerTrace& trace, const DistanceLoss& dist,
                                   double beta, ExplainerGrads& grads) {
  const std::size_t n = g.n;
  const bool deletion_only = !state.allow_insertions;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (deletion_only && !g.adj(i, j)) continue;
      const double add =
          beta * dist.d_aprime(i, j) * detail::edge_deriv(state.p_bar(i, j), trace.mode);
      grads.p_bar(i, j) += add;
      grads.p_bar(j, i) += add;
    }
  if (state.feature_mode == FeatureMode::none) return;
  for (std::size_t k = 0; k < grads.n_bar.size(); ++k) {
    double d = beta * dist.d_xprime.data()[k] * g.features.data()[k];
    if (state.feature_mode == FeatureMode::gate && trace.mode == EvalMode::smooth_sigmoid) {
      const double sg = sigmoid(state.n_bar.data()[k]);
      d *= sg * (1.0 - sg);
    }
    grads.n_bar.data()[k] += d;
  }
}

}  // namespace xplore
