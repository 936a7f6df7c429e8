#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "xplore/dataset_io.hpp"
#include "xplore/explain.hpp"
#include "xplore/generators.hpp"
#include "xplore/model_io.hpp"
#include "xplore/report.hpp"
#include "xplore/results_io.hpp"
#include "xplore/train.hpp"

namespace xplore {

// --- configuration -----------------------------------------------------------

struct DatasetConfig {
  std::string path;  // load from file when set; otherwise generate
  std::string generator = "tree_cycles";
  std::size_t num_graphs = 1000;
  std::size_t nodes_per_graph = 28;
  std::size_t num_cycles = 1;
  std::size_t cycle_size = 6;
  std::size_t base_nodes = 29;
  std::size_t ba_m = 1;
  std::size_t num_motifs = 7;
  double perturb_fraction = 0.1;
  std::size_t grid_size = 3;
  std::size_t num_grids = 1;
};

struct OracleConfig {
  std::string path;  // load from file when set; otherwise train
  std::vector<std::size_t> conv_dims = {20, 20, 20};
  std::vector<std::size_t> dense_dims = {};
  std::string task = "graph_classification";
  std::string pooling = "mean";
  TrainConfig train;
};

struct VariantConfig {
  std::string mode = "xplore_free";  // xplore_free|xplore_gate|xplore_nofree|deletion_only|irand
  ExplainerConfig explainer;
  double irand_p = 0.01;
  std::size_t irand_t = 3;
  double preserve_weight = 1.0;
  bool record_loss_trace = false;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  DatasetConfig dataset;
  OracleConfig oracle;
  std::vector<VariantConfig> variants;
  bool node_task = false;
  bool node_targets_all = true;                                  // policy when node_task
  std::vector<std::pair<std::size_t, std::size_t>> node_targets; // explicit (graph, node) list
  std::size_t max_instances = 0;  // cap on explained test instances; 0 = all
  std::size_t repetitions = 1;
  std::size_t workers = 0;  // 0 = hardware concurrency
  bool record_runtime = true;  // false zeroes timing fields for bytewise reproducibility

  void validate() const {
    if (variants.empty()) throw ConfigError("config: at least one explainer variant required");
    if (repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
    for (const VariantConfig& v : variants) {
      if (v.mode != "xplore_free" && v.mode != "xplore_gate" && v.mode != "xplore_nofree" &&
          v.mode != "deletion_only" && v.mode != "irand")
        throw ConfigError("config: unknown variant mode '" + v.mode + "'");
      v.explainer.validate();
    }
  }
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig c;
  detail::read_field(j, "master_seed", c.master_seed);
  detail::read_field(j, "output_dir", c.output_dir);
  detail::read_field(j, "repetitions", c.repetitions);
  detail::read_field(j, "workers", c.workers);
  detail::read_field(j, "max_instances", c.max_instances);
  detail::read_field(j, "record_runtime", c.record_runtime);
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    detail::read_field(d, "path", c.dataset.path);
    detail::read_field(d, "generator", c.dataset.generator);
    detail::read_field(d, "num_graphs", c.dataset.num_graphs);
    detail::read_field(d, "nodes_per_graph", c.dataset.nodes_per_graph);
    detail::read_field(d, "num_cycles", c.dataset.num_cycles);
    detail::read_field(d, "cycle_size", c.dataset.cycle_size);
    detail::read_field(d, "base_nodes", c.dataset.base_nodes);
    detail::read_field(d, "ba_m", c.dataset.ba_m);
    detail::read_field(d, "num_motifs", c.dataset.num_motifs);
    detail::read_field(d, "perturb_fraction", c.dataset.perturb_fraction);
    detail::read_field(d, "grid_size", c.dataset.grid_size);
    detail::read_field(d, "num_grids", c.dataset.num_grids);
  }
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    detail::read_field(o, "path", c.oracle.path);
    detail::read_field(o, "conv_dims", c.oracle.conv_dims);
    detail::read_field(o, "dense_dims", c.oracle.dense_dims);
    detail::read_field(o, "task", c.oracle.task);
    detail::read_field(o, "pooling", c.oracle.pooling);
    detail::read_field(o, "learning_rate", c.oracle.train.learning_rate);
    detail::read_field(o, "epochs", c.oracle.train.epochs);
    detail::read_field(o, "batch_size", c.oracle.train.batch_size);
  }
  if (j.contains("explainer")) {
    const auto& e = j["explainer"];
    detail::read_field(e, "node_task", c.node_task);
    if (e.contains("node_targets")) {
      if (e["node_targets"].is_string()) {
        if (e["node_targets"].get<std::string>() != "all")
          throw ConfigError("config: node_targets must be \"all\" or a [[graph,node],...] list");
        c.node_targets_all = true;
      } else {
        c.node_targets_all = false;
        for (const auto& t : e["node_targets"])
          c.node_targets.emplace_back(t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>());
      }
    }
    if (e.contains("variants")) {
      for (const auto& vj : e["variants"]) {
        VariantConfig v;
        detail::read_field(vj, "mode", v.mode);
        detail::read_field(vj, "alpha", v.explainer.alpha);
        detail::read_field(vj, "beta", v.explainer.beta);
        detail::read_field(vj, "iterations", v.explainer.iterations);
        detail::read_field(vj, "gamma_fill", v.explainer.gamma_fill);
        detail::read_field(vj, "noise_std", v.explainer.noise_std);
        detail::read_field(vj, "distance_norm", v.explainer.distance_norm);
        detail::read_field(vj, "nonedge_shift", v.explainer.nonedge_shift);
        detail::read_field(vj, "irand_p", v.irand_p);
        detail::read_field(vj, "irand_t", v.irand_t);
        detail::read_field(vj, "preserve_weight", v.preserve_weight);
        detail::read_field(vj, "record_loss_trace", v.record_loss_trace);
        c.variants.push_back(std::move(v));
      }
    }
  }
  if (c.variants.empty()) c.variants.push_back(VariantConfig{});
  c.validate();
  return c;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["repetitions"] = c.repetitions;
  j["workers"] = c.workers;
  j["max_instances"] = c.max_instances;
  j["record_runtime"] = c.record_runtime;
  j["dataset"] = {{"path", c.dataset.path},
                  {"generator", c.dataset.generator},
                  {"num_graphs", c.dataset.num_graphs},
                  {"nodes_per_graph", c.dataset.nodes_per_graph},
                  {"num_cycles", c.dataset.num_cycles},
                  {"cycle_size", c.dataset.cycle_size},
                  {"base_nodes", c.dataset.base_nodes},
                  {"ba_m", c.dataset.ba_m},
                  {"num_motifs", c.dataset.num_motifs},
                  {"perturb_fraction", c.dataset.perturb_fraction},
                  {"grid_size", c.dataset.grid_size},
                  {"num_grids", c.dataset.num_grids}};
  j["oracle"] = {{"path", c.oracle.path},
                 {"conv_dims", c.oracle.conv_dims},
                 {"dense_dims", c.oracle.dense_dims},
                 {"task", c.oracle.task},
                 {"pooling", c.oracle.pooling},
                 {"learning_rate", c.oracle.train.learning_rate},
                 {"epochs", c.oracle.train.epochs},
                 {"batch_size", c.oracle.train.batch_size}};
  auto variants = nlohmann::json::array();
  for (const VariantConfig& v : c.variants) {
    variants.push_back({{"mode", v.mode},
                        {"alpha", v.explainer.alpha},
                        {"beta", v.explainer.beta},
                        {"iterations", v.explainer.iterations},
                        {"gamma_fill", v.explainer.gamma_fill},
                        {"noise_std", v.explainer.noise_std},
                        {"distance_norm", v.explainer.distance_norm},
                        {"nonedge_shift", v.explainer.nonedge_shift},
                        {"irand_p", v.irand_p},
                        {"irand_t", v.irand_t},
                        {"preserve_weight", v.preserve_weight},
                        {"record_loss_trace", v.record_loss_trace}});
  }
  nlohmann::json targets;
  if (c.node_targets_all) {
    targets = "all";
  } else {
    targets = nlohmann::json::array();
    for (auto [g, v] : c.node_targets) targets.push_back({g, v});
  }
  j["explainer"] = {{"node_task", c.node_task},
                    {"node_targets", std::move(targets)},
                    {"variants", std::move(variants)}};
  return j;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

// --- stage helpers -----------------------------------------------------------

namespace detail {

inline void write_resolved_config(const ExperimentConfig& c, const std::string& out_dir,
                                  const std::string& stage) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/resolved_config_" + stage + ".json");
  if (!out) throw IoError("cannot write resolved config in " + out_dir);
  out << experiment_config_to_json(c).dump(2) << '\n';
}

inline Dataset generate_dataset(const ExperimentConfig& c) {
  const std::uint64_t seed = mix_seed(c.master_seed, seed_stream::generate);
  const DatasetConfig& d = c.dataset;
  if (d.generator == "tree_cycles")
    return make_tree_cycles({d.num_graphs, d.nodes_per_graph, d.num_cycles, d.cycle_size, seed});
  if (d.generator == "ba_shapes")
    return make_ba_shapes(
        {d.num_graphs, d.base_nodes, d.ba_m, d.num_motifs, d.perturb_fraction, seed});
  if (d.generator == "tree_grid")
    return make_tree_grid({d.num_graphs, d.nodes_per_graph, d.grid_size, d.num_grids, seed});
  throw ConfigError("config: unknown generator '" + d.generator + "'");
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(1, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// --- pipeline stages ---------------------------------------------------------

// Writes the dataset file and reports per-class counts.
inline std::string cmd_generate(const ExperimentConfig& cfg, std::ostream& log) {
  detail::write_resolved_config(cfg, cfg.output_dir, "generate");
  Dataset d = cfg.dataset.path.empty() ? detail::generate_dataset(cfg)
                                       : load_dataset(cfg.dataset.path);
  d.check_invariants();
  const std::string path = cfg.output_dir + "/dataset.jsonl";
  save_dataset(d, path);
  std::map<int, std::size_t> balance;
  for (const Graph& g : d.graphs)
    if (g.graph_label) ++balance[*g.graph_label];
  log << "dataset: " << d.graphs.size() << " graphs, " << d.num_classes << " classes, f="
      << d.feature_dim << ", train/test " << d.train_idx.size() << "/" << d.test_idx.size()
      << "\n";
  for (auto [cls, count] : balance) log << "  class " << cls << ": " << count << " graphs\n";
  log << "wrote " << path << "\n";
  return path;
}

// Trains the oracle (or copies a pre-trained one) and writes accuracy record.
inline std::string cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  detail::write_resolved_config(cfg, cfg.output_dir, "train");
  const std::string dataset_path =
      cfg.dataset.path.empty() ? cfg.output_dir + "/dataset.jsonl" : cfg.dataset.path;
  Dataset d = load_dataset(dataset_path);

  const Task task =
      cfg.oracle.task == "node_classification" ? Task::node_classification
                                               : Task::graph_classification;
  const Pooling pooling = cfg.oracle.pooling == "sum" ? Pooling::sum : Pooling::mean;
  ArchSpec arch;
  arch.conv_dims = cfg.oracle.conv_dims;
  arch.dense_dims = cfg.oracle.dense_dims;
  TrainConfig tc = cfg.oracle.train;
  tc.seed = mix_seed(cfg.master_seed, seed_stream::train);
  TrainedModel trained = train(d, arch, task, pooling, tc);

  const std::string model_path = cfg.output_dir + "/model.json";
  save_model(trained.model, model_path);
  nlohmann::json acc = {{"train_accuracy", trained.report.train_accuracy},
                        {"test_accuracy", trained.report.test_accuracy},
                        {"final_loss", trained.report.final_loss},
                        {"epochs", trained.report.epochs_run}};
  std::ofstream accf(cfg.output_dir + "/accuracy.json");
  accf << acc.dump(2) << '\n';
  log << "oracle: train acc " << trained.report.train_accuracy << ", test acc "
      << trained.report.test_accuracy << "\n";
  log << "wrote " << model_path << "\n";
  return model_path;
}

struct ExplainedVariant {
  std::string results_path;
  std::vector<ResultRow> rows;
  ResultsHeader header;
};

namespace detail {

// Instances to explain: test-split graphs, or (graph, node) pairs for the
// node task.
inline std::vector<std::pair<std::size_t, std::size_t>> explain_targets(
    const ExperimentConfig& cfg, const Dataset& d) {
  std::vector<std::pair<std::size_t, std::size_t>> targets;
  if (!cfg.node_task) {
    for (std::size_t idx : d.test_idx) targets.emplace_back(idx, 0);
  } else if (cfg.node_targets_all) {
    for (std::size_t idx : d.test_idx)
      for (std::size_t v = 0; v < d.graphs[idx].n; ++v) targets.emplace_back(idx, v);
  } else {
    for (auto [gid, v] : cfg.node_targets) {
      if (gid >= d.graphs.size() || v >= d.graphs[gid].n)
        throw ConfigError("config: node target out of range");
      targets.emplace_back(gid, v);
    }
  }
  if (cfg.max_instances > 0 && targets.size() > cfg.max_instances)
    targets.resize(cfg.max_instances);
  if (targets.empty()) throw ContractError("explain: no instances to explain (empty test split?)");
  return targets;
}

inline CounterfactualResult run_variant_on(const GcnModel& model, const Graph& g,
                                           const VariantConfig& variant, bool node_task,
                                           std::size_t node, std::uint64_t instance_seed) {
  ExplainerConfig e = variant.explainer;
  e.seed = instance_seed;
  e.record_loss_trace = variant.record_loss_trace;
  if (variant.mode == "irand") {
    if (node_task) throw ConfigError("irand baseline supports the graph task only");
    return baseline_irand(model, g, variant.irand_p, variant.irand_t, instance_seed);
  }
  if (variant.mode == "xplore_free") e.feature_mode = FeatureMode::free;
  else if (variant.mode == "xplore_gate") e.feature_mode = FeatureMode::gate;
  else if (variant.mode == "xplore_nofree") e.feature_mode = FeatureMode::none;
  if (variant.mode == "deletion_only") {
    if (node_task) return baseline_deletion_only_node(model, g, node, e, variant.preserve_weight);
    return baseline_deletion_only(model, g, e);
  }
  if (node_task) return explain_node(model, g, node, e, variant.preserve_weight);
  return explain_graph(model, g, e);
}

}  // namespace detail

// Runs one variant over the test split (repetition `rep`), fanning instances
// out across worker threads. Per-instance seeds derive from the master seed,
// variant index, repetition and instance index, so results do not depend on
// thread scheduling.
inline ExplainedVariant run_explain_variant(const ExperimentConfig& cfg, const Dataset& d,
                                            const GcnModel& model, std::size_t variant_idx,
                                            std::size_t rep) {
  const VariantConfig& variant = cfg.variants.at(variant_idx);
  const auto targets = detail::explain_targets(cfg, d);
  const std::uint64_t stage_seed = mix_seed(cfg.master_seed, seed_stream::explain);

  std::vector<ResultRow> rows(targets.size());
  detail::parallel_for(targets.size(), cfg.workers, [&](std::size_t k) {
    const auto [gid, node] = targets[k];
    const std::uint64_t instance_seed =
        mix_seed(stage_seed, (variant_idx << 40) ^ (rep << 20) ^ k);
    CounterfactualResult r = detail::run_variant_on(model, d.graphs[gid], variant,
                                                    cfg.node_task, node, instance_seed);
    if (!cfg.record_runtime) r.runtime_ms = 0.0;
    rows[k] = make_result_row(gid, r, variant.record_loss_trace,
                              cfg.node_task ? std::optional<std::size_t>(node) : std::nullopt);
  });

  ExplainedVariant out;
  out.rows = std::move(rows);
  out.header.variant = variant.mode;
  out.header.task = cfg.node_task ? "node_classification" : "graph_classification";
  out.header.config_hash = hash_hex(fnv1a64(experiment_config_to_json(cfg).dump()));
  return out;
}

// Explains the test split with every configured variant and writes one
// results file per variant (single writer; workers only fill memory).
inline std::vector<ExplainedVariant> cmd_explain(const ExperimentConfig& cfg, std::ostream& log) {
  detail::write_resolved_config(cfg, cfg.output_dir, "explain");
  const std::string dataset_path =
      cfg.dataset.path.empty() ? cfg.output_dir + "/dataset.jsonl" : cfg.dataset.path;
  const std::string model_path =
      cfg.oracle.path.empty() ? cfg.output_dir + "/model.json" : cfg.oracle.path;
  Dataset d = load_dataset(dataset_path);
  GcnModel model = load_model(model_path);
  if ((model.task == Task::node_classification) != cfg.node_task)
    throw ConfigError("config: node_task flag does not match the model's task");
  const std::string dataset_hash = hash_file(dataset_path);
  const std::string model_hash = hash_file(model_path);

  std::vector<ExplainedVariant> out;
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    ExplainedVariant ev = run_explain_variant(cfg, d, model, vi, 0);
    ev.header.dataset_hash = dataset_hash;
    ev.header.model_hash = model_hash;
    ev.results_path = cfg.output_dir + "/results_" + cfg.variants[vi].mode + ".jsonl";
    save_results(ev.header, ev.rows, ev.results_path);
    std::size_t found = 0;
    for (const ResultRow& r : ev.rows) found += r.found ? 1 : 0;
    log << "variant " << cfg.variants[vi].mode << ": " << found << "/" << ev.rows.size()
        << " counterfactuals found -> " << ev.results_path << "\n";
    out.push_back(std::move(ev));
  }
  return out;
}

// Re-runs the oracle on every stored counterfactual (stale-results defense),
// then aggregates the metric suite.
inline MetricsReport evaluate_rows(const std::vector<ResultRow>& rows, const Dataset& d,
                                   const GcnModel& model, bool node_task) {
  std::vector<int> labels;
  std::vector<const Graph*> originals;
  for (const ResultRow& r : rows) {
    if (r.graph_id >= d.graphs.size())
      throw SchemaError("evaluate: results reference graph beyond dataset");
    const Graph& g = d.graphs[r.graph_id];
    originals.push_back(&g);
    if (node_task) {
      if (!r.target_node || !g.node_labels)
        throw SchemaError("evaluate: node-task results need target nodes and node labels");
      labels.push_back((*g.node_labels)[*r.target_node]);
    } else {
      if (!g.graph_label) throw SchemaError("evaluate: dataset lacks graph labels");
      labels.push_back(*g.graph_label);
    }
    if (r.found) {
      const Graph cf = cf_graph_from_row(r, g);
      const Prediction p = forward(model, cf);
      const int pred = node_task ? p.node_preds[*r.target_node] : p.graph_pred;
      if (pred != r.cf_pred)
        throw SchemaError("evaluate: stored counterfactual prediction is stale (graph " +
                          std::to_string(r.graph_id) + ")");
    }
  }
  const EmbedderConfig embed_cfg = embedder_config_for(rows, originals);
  return compute_metrics(rows, labels, originals, embed_cfg);
}

// Evaluate a results file against the dataset/model files it was made from.
inline MetricsReport cmd_evaluate(const std::string& results_path,
                                  const std::string& dataset_path,
                                  const std::string& model_path, const std::string& out_dir,
                                  std::ostream& log) {
  auto [header, rows] = load_results(results_path);
  if (header.dataset_hash != hash_file(dataset_path))
    throw ConfigError("evaluate: dataset file does not match the hash in " + results_path);
  if (header.model_hash != hash_file(model_path))
    throw ConfigError("evaluate: model file does not match the hash in " + results_path);
  Dataset d = load_dataset(dataset_path);
  GcnModel model = load_model(model_path);
  const bool node_task = header.task == "node_classification";
  MetricsReport rep = evaluate_rows(rows, d, model, node_task);
  std::filesystem::create_directories(out_dir);
  save_metrics_json(rep, out_dir + "/metrics_" + header.variant + ".json");
  save_metrics_csv(rep, out_dir + "/metrics_" + header.variant + ".csv");
  log << "variant " << header.variant << ": validity " << rep.validity << "%, fidelity "
      << rep.fidelity << ", ged " << rep.ged_mean << ", sparsity " << rep.sparsity_mean
      << ", cs " << rep.cosine_similarity_mean << ", oracle calls " << rep.oracle_calls_mean
      << "\n";
  return rep;
}

// --- compare -----------------------------------------------------------------

struct VariantSummary {
  std::string mode;
  // metric name -> per-repetition values
  std::map<std::string, std::vector<double>> values;
};

inline void accumulate_summary(VariantSummary& s, const MetricsReport& rep) {
  s.values["validity"].push_back(rep.validity);
  s.values["fidelity"].push_back(rep.fidelity);
  s.values["ged"].push_back(rep.ged_mean);
  s.values["sparsity"].push_back(rep.sparsity_mean);
  s.values["oracle_calls"].push_back(rep.oracle_calls_mean);
  s.values["cosine_similarity"].push_back(rep.cosine_similarity_mean);
  s.values["runtime_ms"].push_back(rep.runtime_mean_ms);
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  double mean = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      mean += x;
      ++n;
    }
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : v)
    if (!std::isnan(x)) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Runs every variant x repetition, evaluates each run, and emits a
// variant-by-metric CSV with mean and std columns.
inline std::string cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  detail::write_resolved_config(cfg, cfg.output_dir, "compare");
  const std::string dataset_path =
      cfg.dataset.path.empty() ? cfg.output_dir + "/dataset.jsonl" : cfg.dataset.path;
  const std::string model_path =
      cfg.oracle.path.empty() ? cfg.output_dir + "/model.json" : cfg.oracle.path;
  Dataset d = load_dataset(dataset_path);
  GcnModel model = load_model(model_path);
  if ((model.task == Task::node_classification) != cfg.node_task)
    throw ConfigError("config: node_task flag does not match the model's task");

  std::vector<VariantSummary> summaries(cfg.variants.size());
  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    summaries[vi].mode = cfg.variants[vi].mode;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      ExplainedVariant ev = run_explain_variant(cfg, d, model, vi, rep);
      MetricsReport mr = evaluate_rows(ev.rows, d, model, cfg.node_task);
      accumulate_summary(summaries[vi], mr);
      log << "variant " << summaries[vi].mode << " rep " << rep << ": validity " << mr.validity
          << "%\n";
    }
  }

  static const char* metrics[] = {"validity",     "fidelity",          "ged",       "sparsity",
                                  "oracle_calls", "cosine_similarity", "runtime_ms"};
  const std::string path = cfg.output_dir + "/comparison.csv";
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream out(path);
  if (!out) throw IoError("cmd_compare: cannot open " + path);
  out << "variant";
  for (const char* m : metrics) out << ',' << m << "_mean," << m << "_std";
  out << '\n';
  for (const VariantSummary& s : summaries) {
    out << s.mode;
    for (const char* m : metrics) {
      auto [mean, sd] = mean_std(s.values.at(m));
      out << ',' << detail::csv_num(mean) << ',' << detail::csv_num(sd);
    }
    out << '\n';
  }
  if (!out) throw IoError("cmd_compare: write failure on " + path);
  log << "wrote " << path << "\n";
  return path;
}

}  // namespace xplore
