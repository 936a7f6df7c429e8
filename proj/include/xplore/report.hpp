#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "xplore/graph.hpp"
#include "xplore/metrics.hpp"
#include "xplore/results_io.hpp"

namespace xplore {

// Validity in percent. Instances without a counterfactual count as non-flips.
inline double validity(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw ContractError("validity: empty result set");
  double flips = 0.0;
  for (const ResultRow& r : rows)
    if (r.found && r.cf_pred != r.initial_pred) flips += 1.0;
  return 100.0 * flips / static_cast<double>(rows.size());
}

// Per-instance max(1[oracle correct on G] - 1[oracle still correct on G'], 0),
// averaged. Ground-truth labels are indexed by graph_id (node-task rows use
// the per-node label of the target).
inline double fidelity_term(const ResultRow& r, int true_label) {
  const int on_g = r.initial_pred == true_label ? 1 : 0;
  const int on_cf = (r.found ? r.cf_pred : r.initial_pred) == true_label ? 1 : 0;
  return std::max(on_g - on_cf, 0);
}

inline double fidelity(const std::vector<ResultRow>& rows, const std::vector<int>& true_labels) {
  if (rows.size() != true_labels.size())
    throw ContractError("fidelity: label/result length mismatch");
  if (rows.empty()) throw ContractError("fidelity: empty result set");
  double acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) acc += fidelity_term(rows[i], true_labels[i]);
  return acc / static_cast<double>(rows.size());
}

// Structural edits relative to the original's edge count.
inline double sparsity(const ResultRow& r, const Graph& original) {
  const std::size_t edges = original.edge_count();
  if (edges == 0) throw ContractError("sparsity: original graph has no edges");
  return static_cast<double>(r.edges_added + r.edges_removed) / static_cast<double>(edges);
}

struct InstanceMetrics {
  std::size_t graph_id = 0;
  bool found = false;
  int initial_pred = -1;
  int cf_pred = -1;
  double flipped = 0.0;
  double fidelity = 0.0;
  double ged = std::numeric_limits<double>::quiet_NaN();
  double sparsity = std::numeric_limits<double>::quiet_NaN();
  double cs = std::numeric_limits<double>::quiet_NaN();
  double oracle_calls = std::numeric_limits<double>::quiet_NaN();
  double runtime_ms = 0.0;
};

struct MetricsReport {
  double validity = 0.0;                 // percent
  double fidelity = 0.0;                 // mean in [0,1]
  double sparsity_mean = 0.0;
  double ged_mean = 0.0;
  double ged_std = 0.0;
  double oracle_calls_mean = 0.0;
  double runtime_mean_ms = 0.0;
  double cosine_similarity_mean = 0.0;
  std::size_t instances = 0;
  std::size_t found_count = 0;
  std::vector<InstanceMetrics> rows;
};

// Aggregates per-instance rows into the full metric suite. Not-found
// instances are failures for validity/fidelity and excluded from the
// GED / sparsity / CS / oracle-call / runtime means.
inline MetricsReport compute_metrics(const std::vector<ResultRow>& rows,
                                     const std::vector<int>& true_labels,
                                     const std::vector<const Graph*>& originals,
                                     const EmbedderConfig& embed_cfg,
                                     const std::vector<Embedder>& embedders = default_embedders()) {
  if (rows.empty()) throw ContractError("compute_metrics: empty result set");
  if (rows.size() != true_labels.size() || rows.size() != originals.size())
    throw ContractError("compute_metrics: row/label/graph counts differ");

  MetricsReport rep;
  rep.instances = rows.size();
  double ged_sum = 0.0, ged_sq = 0.0, sp_sum = 0.0, calls_sum = 0.0, rt_sum = 0.0, cs_sum = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ResultRow& r = rows[k];
    InstanceMetrics im;
    im.graph_id = r.graph_id;
    im.found = r.found;
    im.initial_pred = r.initial_pred;
    im.cf_pred = r.cf_pred;
    im.flipped = r.found && r.cf_pred != r.initial_pred ? 1.0 : 0.0;
    im.fidelity = fidelity_term(r, true_labels[k]);
    im.runtime_ms = r.runtime_ms;
    if (r.found) {
      ++rep.found_count;
      im.ged = static_cast<double>(r.edges_added + r.edges_removed);
      im.sparsity = sparsity(r, *originals[k]);
      im.oracle_calls = static_cast<double>(r.oracle_calls);
      const Graph cf = cf_graph_from_row(r, *originals[k]);
      double cs = 0.0;
      for (Embedder e : embedders)
        cs += cosine_similarity(embed(*originals[k], e, embed_cfg), embed(cf, e, embed_cfg));
      im.cs = cs / static_cast<double>(embedders.size());
      ged_sum += im.ged;
      ged_sq += im.ged * im.ged;
      sp_sum += im.sparsity;
      calls_sum += im.oracle_calls;
      rt_sum += r.runtime_ms;
      cs_sum += im.cs;
    }
    rep.rows.push_back(im);
  }
  rep.validity = validity(rows);
  rep.fidelity = fidelity(rows, true_labels);
  const auto nf = static_cast<double>(rep.found_count);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.ged_mean = rep.found_count ? ged_sum / nf : nan;
  rep.ged_std = rep.found_count
                    ? std::sqrt(std::max(0.0, ged_sq / nf - rep.ged_mean * rep.ged_mean))
                    : nan;
  rep.sparsity_mean = rep.found_count ? sp_sum / nf : nan;
  rep.oracle_calls_mean = rep.found_count ? calls_sum / nf : nan;
  rep.runtime_mean_ms = rep.found_count ? rt_sum / nf : nan;
  rep.cosine_similarity_mean = rep.found_count ? cs_sum / nf : nan;
  return rep;
}

// Fixed histogram range covering originals and counterfactuals of a run.
inline EmbedderConfig embedder_config_for(const std::vector<ResultRow>& rows,
                                          const std::vector<const Graph*>& originals) {
  EmbedderConfig cfg;
  std::size_t max_deg = 1;
  for (std::size_t k = 0; k < originals.size(); ++k) {
    for (std::size_t v = 0; v < originals[k]->n; ++v)
      max_deg = std::max(max_deg, originals[k]->degree(v));
    if (rows[k].found) {
      const Graph cf = cf_graph_from_row(rows[k], *originals[k]);
      for (std::size_t v = 0; v < cf.n; ++v) max_deg = std::max(max_deg, cf.degree(v));
    }
  }
  cfg.max_degree = max_deg;
  return cfg;
}

namespace detail {
inline nlohmann::json num_or_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}
inline std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}
}  // namespace detail

inline nlohmann::json metrics_to_json(const MetricsReport& rep) {
  nlohmann::json j;
  j["validity"] = rep.validity;
  j["fidelity"] = rep.fidelity;
  j["sparsity_mean"] = detail::num_or_null(rep.sparsity_mean);
  j["ged_mean"] = detail::num_or_null(rep.ged_mean);
  j["ged_std"] = detail::num_or_null(rep.ged_std);
  j["oracle_calls_mean"] = detail::num_or_null(rep.oracle_calls_mean);
  j["runtime_mean_ms"] = detail::num_or_null(rep.runtime_mean_ms);
  j["cosine_similarity_mean"] = detail::num_or_null(rep.cosine_similarity_mean);
  j["instances"] = rep.instances;
  j["found_count"] = rep.found_count;
  auto rows = nlohmann::json::array();
  for (const InstanceMetrics& im : rep.rows) {
    rows.push_back({{"graph_id", im.graph_id},
                    {"found", im.found},
                    {"initial_pred", im.initial_pred},
                    {"cf_pred", im.cf_pred},
                    {"flipped", im.flipped},
                    {"fidelity", im.fidelity},
                    {"ged", detail::num_or_null(im.ged)},
                    {"sparsity", detail::num_or_null(im.sparsity)},
                    {"cosine_similarity", detail::num_or_null(im.cs)},
                    {"oracle_calls", detail::num_or_null(im.oracle_calls)},
                    {"runtime_ms", im.runtime_ms}});
  }
  j["per_instance"] = std::move(rows);
  return j;
}

inline void save_metrics_json(const MetricsReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_metrics_json: cannot open " + path);
  out << metrics_to_json(rep).dump(2) << '\n';
  if (!out) throw IoError("save_metrics_json: write failure on " + path);
}

// Flat CSV: one row per instance plus a trailing summary row.
inline void save_metrics_csv(const MetricsReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_metrics_csv: cannot open " + path);
  out << "graph_id,found,initial_pred,cf_pred,flipped,fidelity,ged,sparsity,"
         "cosine_similarity,oracle_calls,runtime_ms\n";
  for (const InstanceMetrics& im : rep.rows) {
    out << im.graph_id << ',' << (im.found ? 1 : 0) << ',' << im.initial_pred << ','
        << im.cf_pred << ',' << im.flipped << ',' << im.fidelity << ','
        << detail::csv_num(im.ged) << ',' << detail::csv_num(im.sparsity) << ','
        << detail::csv_num(im.cs) << ',' << detail::csv_num(im.oracle_calls) << ','
        << detail::csv_num(im.runtime_ms) << '\n';
  }
  out << "summary," << rep.instances << ",,," << detail::csv_num(rep.validity / 100.0) << ','
      << detail::csv_num(rep.fidelity) << ',' << detail::csv_num(rep.ged_mean) << ','
      << detail::csv_num(rep.sparsity_mean) << ',' << detail::csv_num(rep.cosine_similarity_mean)
      << ',' << detail::csv_num(rep.oracle_calls_mean) << ','
      << detail::csv_num(rep.runtime_mean_ms) << '\n';
  if (!out) throw IoError("save_metrics_csv: write failure on " + path);
}

}  // namespace xplore
