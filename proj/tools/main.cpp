#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "linksched/commands.hpp"
#include "linksched/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNN-based binary power control for K-user interference networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  std::string out_override;
  int threads_override = 0;
  bool quiet = false;

  app.add_option("--config", config_path, "Experiment config file (key = value lines)");
  app.add_option("--seed", seed_override, "Override run.master_seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_override, "Override run.out_dir");
  app.add_option("--threads", threads_override, "Override run.threads");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate unlabeled datasets");
  std::vector<int> gen_ks;
  std::string gen_split = "both";
  gen->add_option("--k", gen_ks, "Network sizes (default: run.k_list)");
  gen->add_option("--split", gen_split, "train, test, or both")
      ->check(CLI::IsMember({"train", "test", "both"}));

  // label
  auto* label = app.add_subcommand("label", "Label datasets via exhaustive search");
  std::vector<std::string> label_paths;
  label->add_option("paths", label_paths, "Dataset files")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train one model per configured seed");
  int train_k = 0;
  std::string train_regime;
  int train_epochs = -1;
  int train_ssl_epochs = -1;
  tr->add_option("--k", train_k, "Network size to train on")->required();
  tr->add_option("--regime", train_regime,
                 "supervised | unsupervised | ssl_then_supervised | ssl_then_unsupervised");
  tr->add_option("--epochs", train_epochs, "Override train.epochs");
  tr->add_option("--ssl-epochs", train_ssl_epochs, "Override train.ssl_epochs");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled dataset");
  std::string eval_ckpt, eval_data, eval_csv;
  ev->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  ev->add_option("--test-data", eval_data, "Labeled dataset file")->required();
  ev->add_option("--csv", eval_csv, "Optional per-sample CSV output path");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run a comparison study");
  std::string study;
  sw->add_option("--study", study, "fig2a | fig2b | fig2c | fig2d | all")->required();

  // bench-labeling
  app.add_subcommand("bench-labeling", "Benchmark unlabeled vs labeled sample generation");

  // validate
  auto* val = app.add_subcommand("validate", "Check dataset files");
  std::vector<std::string> val_paths;
  bool val_deep = false;
  val->add_option("paths", val_paths, "Dataset files")->required();
  val->add_flag("--deep", val_deep, "Re-run the exhaustive search per labeled record");

  CLI11_PARSE(app, argc, argv);

  try {
    linksched::ExperimentConfig cfg = linksched::load_config(config_path);
    if (seed_set) cfg.master_seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (threads_override > 0) cfg.threads = threads_override;
    if (quiet) cfg.quiet = true;

    if (gen->parsed()) {
      const std::vector<int> ks = gen_ks.empty() ? cfg.k_list : gen_ks;
      std::vector<std::string> splits;
      if (gen_split == "both") {
        splits = {"train", "test"};
      } else {
        splits = {gen_split};
      }
      linksched::cmd_generate(cfg, ks, splits);
    } else if (label->parsed()) {
      linksched::cmd_label(cfg, label_paths);
    } else if (tr->parsed()) {
      if (!train_regime.empty()) cfg.regime.kind = linksched::parse_regime(train_regime);
      if (train_epochs >= 0) cfg.regime.epochs = train_epochs;
      if (train_ssl_epochs >= 0) cfg.regime.ssl_epochs = train_ssl_epochs;
      linksched::validate_config(cfg);
      linksched::cmd_train(cfg, train_k);
    } else if (ev->parsed()) {
      linksched::cmd_eval(cfg, eval_ckpt, eval_data, eval_csv);
    } else if (sw->parsed()) {
      linksched::cmd_sweep(cfg, study);
    } else if (app.get_subcommand("bench-labeling")->parsed()) {
      linksched::cmd_bench_labeling(cfg);
    } else if (val->parsed()) {
      linksched::cmd_validate(cfg, val_paths, val_deep);
    }
  } catch (const linksched::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const linksched::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const linksched::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
