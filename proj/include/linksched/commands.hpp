#pragma once

#include <string>
#include <vector>

#include "linksched/config.hpp"
#include "linksched/dataset.hpp"
#include "linksched/eval.hpp"

namespace linksched {

/// Canonical on-disk location of a dataset: <out_dir>/k<k>_<split>.ds
std::string dataset_path(const ExperimentConfig& cfg, int k, const std::string& split);

/// Builds train/eval samples (graphs included) from a dataset's records.
std::vector<TrainSample> samples_from_dataset(const Dataset& ds, bool require_labels);

/// Generates unlabeled datasets for the given k values and splits.
void cmd_generate(const ExperimentConfig& cfg, const std::vector<int>& ks,
                  const std::vector<std::string>& splits);

/// Labels every unlabeled record via exhaustive search; already-labeled
/// records are skipped, so a second pass is a no-op.
void cmd_label(const ExperimentConfig& cfg, const std::vector<std::string>& paths);

/// Trains one run per configured seed; writes per-epoch CSV, best/final
/// checkpoints, and a run manifest per seed.
void cmd_train(const ExperimentConfig& cfg, int k);

struct EvalOutput {
  EvalReport report;
  double all_on_metric = 0.0;
};

/// Evaluates a checkpoint on a labeled dataset; optionally writes a
/// per-sample CSV.
EvalOutput cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                    const std::string& test_data_path, const std::string& csv_path = "");

/// Runs one of the comparison studies (fig2a, fig2b, fig2c, fig2d, or all),
/// reusing finished training cells and completing only missing ones.
void cmd_sweep(const ExperimentConfig& cfg, const std::string& study);

/// Produces the labeling-cost benchmark CSV.
void cmd_bench_labeling(const ExperimentConfig& cfg);

/// Checks dataset files; with `deep`, re-runs the exhaustive search per
/// labeled record.
void cmd_validate(const ExperimentConfig& cfg, const std::vector<std::string>& paths, bool deep);

}  // namespace linksched
