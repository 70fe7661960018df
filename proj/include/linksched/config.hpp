#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksched/channel.hpp"
#include "linksched/train.hpp"

namespace linksched {

/// Every knob of an experiment. Defaults follow the reference setup; the
/// config file may override any of them with `section.key = value` lines.
struct ExperimentConfig {
  SystemParams sys;
  GeometryParams geom;
  PathLossParams pl;

  int k_max_exhaustive = 20;  // oracle.k_max_exhaustive

  std::vector<int> hidden_dims = {64, 64, 64};  // gnn.hidden_dims
  double leaky_slope = 1e-2;                    // gnn.leaky_slope

  TrainingRegime regime;  // train.*

  std::vector<int> k_list = {4, 6, 8, 10};          // run.k_list
  int n_train = 256;                                // run.n_train
  int n_test = 256;                                 // run.n_test
  std::uint64_t master_seed = 20260801;             // run.master_seed
  std::vector<std::uint64_t> train_seeds = {1, 2, 3};  // run.train_seeds
  std::string out_dir = "out";                      // run.out_dir
  int threads = 1;                                  // run.threads
  bool quiet = false;                               // run.quiet

  std::vector<int> bench_k = {4, 5, 6, 7, 8, 9, 10};  // bench.k_values
  int bench_samples = 200;                            // bench.n_samples

  double convergence_threshold = 0.8;                // eval.convergence_threshold
  std::vector<int> sample_sizes = {32, 64, 128, 256};  // eval.sample_sizes
  std::vector<int> k_train_list = {4, 10};             // eval.k_train_list

  /// Layer width chain F0..FL (F0 = 1).
  std::vector<int> dims() const;

  /// Digest over everything that determines the content of one dataset file.
  std::string data_digest(int k, const std::string& split, int n) const;

  /// Digest over the whole experiment identity (excludes out_dir, threads,
  /// quiet, which affect where/how things run but not the results).
  std::string full_digest() const;
};

/// Defaults when `path` is empty, else defaults overlaid with the file.
/// Lines are `key = value`; '#' starts a comment; unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

/// Applies one key/value pair (shared by the file loader and CLI overrides).
void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Cross-field sanity checks; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

}  // namespace linksched
