#pragma once

#include <cmath>
#include <cstddef>

#include "xplore/explain.hpp"
#include "xplore/grad.hpp"

namespace xplore {

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  bool worst_is_feature = false;
  std::size_t params_checked = 0;
};

namespace detail {

// Smooth-surrogate objective (sigmoid in place of the hard threshold) with
// the flip indicator evaluated against a fixed original prediction; this is
// exactly the function whose analytic gradient the engine produces.
inline double surrogate_loss(const GcnModel& model, const Graph& g,
                             const PerturbationState& state, int y, double beta, double norm_p) {
  ExplainerTrace trace = explainer_forward(model, g, state, EvalMode::smooth_sigmoid);
  const int pred = argmax_row(trace.pipe.logits, 0);
  const double l_pred = pred == y ? -cross_entropy_row(trace.pipe.logits, 0, y) : 0.0;
  return l_pred + beta * distance_loss(g, trace.a_prime, trace.x_pert, norm_p).value;
}

}  // namespace detail

// Central-difference validation of the analytic gradients in smooth mode.
// Perturbs each undirected edge parameter (both mirrored entries together)
// and each feature multiplier. Large errors are reported, never thrown.
inline FiniteDiffReport finite_diff_check(const GcnModel& model, const Graph& g,
                                          const PerturbationState& state, double step,
                                          double beta = 0.5, double norm_p = 1.0) {
  if (step <= 0.0) throw ConfigError("finite_diff_check: step must be > 0");
  const int y = forward(model, g).graph_pred;

  ExplainerTrace trace = explainer_forward(model, g, state, EvalMode::smooth_sigmoid);
  const int pred = argmax_row(trace.pipe.logits, 0);
  Matrix dlogits(trace.pipe.logits.rows(), trace.pipe.logits.cols());
  ExplainerGrads grads;
  if (pred == y) {
    cross_entropy_grad_row(trace.pipe.logits, 0, y, -1.0, dlogits);
    grads = explainer_backward(model, g, state, trace, dlogits);
  } else {
    grads.p_bar = Matrix(g.n, g.n);
    grads.n_bar = Matrix(state.n_bar.rows(), state.n_bar.cols());
  }
  const DistanceLoss dist = distance_loss(g, trace.a_prime, trace.x_pert, norm_p);
  add_distance_gradients(g, state, trace, dist, beta, grads);

  FiniteDiffReport report;
  PerturbationState probe = state;
  auto record = [&](double analytic, double numeric, std::size_t i, std::size_t j,
                    bool is_feature) {
    ++report.params_checked;
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
    const double rel = std::fabs(analytic - numeric) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
      report.worst_i = i;
      report.worst_j = j;
      report.worst_is_feature = is_feature;
    }
  };

  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j) {
      const double orig = state.p_bar(i, j);
      probe.p_bar(i, j) = probe.p_bar(j, i) = orig + step;
      const double up = detail::surrogate_loss(model, g, probe, y, beta, norm_p);
      probe.p_bar(i, j) = probe.p_bar(j, i) = orig - step;
      const double dn = detail::surrogate_loss(model, g, probe, y, beta, norm_p);
      probe.p_bar(i, j) = probe.p_bar(j, i) = orig;
      record(grads.p_bar(i, j), (up - dn) / (2.0 * step), i, j, false);
    }

  if (state.feature_mode != FeatureMode::none) {
    for (std::size_t i = 0; i < state.n_bar.rows(); ++i)
      for (std::size_t j = 0; j < state.n_bar.cols(); ++j) {
        const double orig = state.n_bar(i, j);
        probe.n_bar(i, j) = orig + step;
        const double up = detail::surrogate_loss(model, g, probe, y, beta, norm_p);
        probe.n_bar(i, j) = orig - step;
        const double dn = detail::surrogate_loss(model, g, probe, y, beta, norm_p);
        probe.n_bar(i, j) = orig;
        record(grads.n_bar(i, j), (up - dn) / (2.0 * step), i, j, true);
      }
  }
  return report;
}

}  // namespace xplore
