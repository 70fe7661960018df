#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linksched/train.hpp"

namespace linksched {

struct EvalReport {
  std::vector<double> achieved;  // per-sample thresholded sum-rate
  std::vector<double> optimal;   // per-sample exhaustive-search optimum
  double ratio_of_sums = 0.0;    // primary normalized metric
  double mean_of_ratios = 0.0;   // emitted alongside for transparency
  int k_train = 0;
  int k_test = 0;
  std::uint64_t seed_id = 0;
};

/// Forward + threshold + sum-rate over a labeled test set. The normalized
/// metric is sum(achieved) / sum(optimal).
EvalReport evaluate(const GnnModel& model, const std::vector<TrainSample>& test_set,
                    const SystemParams& sys);

/// First 1-based epoch whose metric strictly exceeds the threshold.
std::optional<int> convergence_epoch(const std::vector<double>& metric_log,
                                     double threshold = 0.8);

struct SampleComplexityRow {
  int k = 0;
  int n_train = 0;
  std::string regime;
  double mean = 0.0;
  double stdev = 0.0;
};

/// Trains on nested prefixes of a fixed shuffle of the training set and
/// reports the best test metric per size, aggregated over seeds.
std::vector<SampleComplexityRow> sample_complexity_sweep(
    const std::vector<TrainSample>& full_train, const std::vector<TrainSample>& test_set,
    const TrainingRegime& regime, const std::vector<int>& sizes,
    const std::vector<std::uint64_t>& seeds, const SystemParams& sys,
    const std::vector<int>& dims, double leaky_slope, std::uint64_t subset_seed);

/// The fixed subset ordering used by the sweep (exposed so callers can verify
/// the prefix property).
std::vector<int> subset_order(int n, std::uint64_t subset_seed);

struct GeneralizationRow {
  int k_train = 0;
  int k_test = 0;
  std::string regime;
  double mean = 0.0;
  double stdev = 0.0;
};

/// Evaluates the per-seed models trained at K_train on test sets of other
/// sizes.
std::vector<GeneralizationRow> generalization_sweep(
    const std::vector<GnnModel>& models_per_seed, int k_train,
    const std::vector<std::pair<int, const std::vector<TrainSample>*>>& test_sets,
    const std::string& regime, const SystemParams& sys);

/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_stdev(const std::vector<double>& values);

}  // namespace linksched
