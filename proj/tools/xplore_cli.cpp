#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "xplore/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t workers = 0;
  bool workers_set = false;
};

xplore::ExperimentConfig resolve_config(const CommonOpts& opts) {
  xplore::ExperimentConfig cfg = xplore::load_experiment_config(opts.config_path);
  if (opts.seed_set) cfg.master_seed = opts.seed;
  if (opts.workers_set) cfg.workers = opts.workers;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config JSON")->required();
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "master seed (overrides config)")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--workers", opts.workers, "worker threads (overrides config)")
      ->each([&](const std::string&) { opts.workers_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GCN counterfactual explanation workbench"};
  app.require_subcommand(1);

  CommonOpts gen_opts, train_opts, explain_opts, compare_opts;
  CLI::App* cmd_gen = app.add_subcommand("generate", "generate a synthetic dataset");
  add_common(cmd_gen, gen_opts);
  CLI::App* cmd_train = app.add_subcommand("train", "train the GCN oracle");
  add_common(cmd_train, train_opts);
  CLI::App* cmd_explain = app.add_subcommand("explain", "search counterfactuals on the test split");
  add_common(cmd_explain, explain_opts);
  CLI::App* cmd_compare = app.add_subcommand("compare", "run all variants and tabulate metrics");
  add_common(cmd_compare, compare_opts);

  std::string eval_results, eval_dataset, eval_model, eval_out = "out";
  CLI::App* cmd_eval = app.add_subcommand("evaluate", "compute the metric suite for a results file");
  cmd_eval->add_option("--results", eval_results, "results JSONL file")->required();
  cmd_eval->add_option("--dataset", eval_dataset, "dataset JSONL file")->required();
  cmd_eval->add_option("--model", eval_model, "model JSON file")->required();
  cmd_eval->add_option("--out", eval_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmd_gen->parsed()) {
      xplore::cmd_generate(resolve_config(gen_opts), std::cout);
    } else if (cmd_train->parsed()) {
      xplore::cmd_train(resolve_config(train_opts), std::cout);
    } else if (cmd_explain->parsed()) {
      xplore::cmd_explain(resolve_config(explain_opts), std::cout);
    } else if (cmd_eval->parsed()) {
      xplore::cmd_evaluate(eval_results, eval_dataset, eval_model, eval_out, std::cout);
    } else if (cmd_compare->parsed()) {
      xplore::cmd_compare(resolve_config(compare_opts), std::cout);
    }
  } catch (const xplore::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const xplore::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const xplore::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitIo;
  } catch (const xplore::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const xplore::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
