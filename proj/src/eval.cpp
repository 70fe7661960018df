#include "linksched/eval.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

EvalReport evaluate(const GnnModel& model, const std::vector<TrainSample>& test_set,
                    const SystemParams& sys) {
  if (test_set.empty()) {
    throw DataError("evaluate: empty test set");
  }

  std::vector<const InterferenceGraph*> graphs;
  graphs.reserve(test_set.size());
  for (const TrainSample& s : test_set) {
    if (!s.has_label || !(s.opt_sum_rate > 0.0)) {
      throw DataError("evaluate: test samples need labels with positive optimal sum-rate");
    }
    graphs.push_back(&s.graph);
  }

  const GraphBatch batch = GraphBatch::from(graphs);
  const ForwardTrace trace = gnn_forward(batch, model);

  EvalReport report;
  report.k_test = test_set.front().channel.k();
  report.k_train = model.dims.empty() ? 0 : report.k_test;
  report.achieved.reserve(test_set.size());
  report.optimal.reserve(test_set.size());

  double sum_achieved = 0.0;
  double sum_optimal = 0.0;
  double ratio_total = 0.0;
  for (size_t i = 0; i < test_set.size(); ++i) {
    const Eigen::VectorXd psi =
        trace.psi.segment(batch.offsets[i], batch.graph_size(static_cast<int>(i)));
    const Schedule sched = threshold_schedule(psi);
    const double achieved = sum_rate(test_set[i].channel, sched, sys);
    const double optimal = test_set[i].opt_sum_rate;
    report.achieved.push_back(achieved);
    report.optimal.push_back(optimal);
    sum_achieved += achieved;
    sum_optimal += optimal;
    ratio_total += achieved / optimal;
  }
  report.ratio_of_sums = sum_achieved / sum_optimal;
  report.mean_of_ratios = ratio_total / static_cast<double>(test_set.size());
  return report;
}

std::optional<int> convergence_epoch(const std::vector<double>& metric_log, double threshold) {
  for (size_t i = 0; i < metric_log.size(); ++i) {
    if (metric_log[i] > threshold) {
      return static_cast<int>(i) + 1;
    }
  }
  return std::nullopt;
}

std::vector<int> subset_order(int n, std::uint64_t subset_seed) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = Rng::derive(subset_seed, {stream::kSubsetOrder});
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

std::vector<SampleComplexityRow> sample_complexity_sweep(
    const std::vector<TrainSample>& full_train, const std::vector<TrainSample>& test_set,
    const TrainingRegime& regime, const std::vector<int>& sizes,
    const std::vector<std::uint64_t>& seeds, const SystemParams& sys,
    const std::vector<int>& dims, double leaky_slope, std::uint64_t subset_seed) {
  const std::vector<int> order = subset_order(static_cast<int>(full_train.size()), subset_seed);
  const int k = full_train.empty() ? 0 : full_train.front().channel.k();

  std::vector<SampleComplexityRow> rows;
  for (int size : sizes) {
    if (size > static_cast<int>(full_train.size())) {
      throw DataError("sample_complexity_sweep: requested " + std::to_string(size) +
                      " samples but dataset has " + std::to_string(full_train.size()));
    }
    std::vector<TrainSample> subset;
    subset.reserve(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) {
      subset.push_back(full_train[static_cast<size_t>(order[static_cast<size_t>(i)])]);
    }

    std::vector<double> metrics;
    metrics.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
      const TrainResult r = train(subset, test_set, regime, sys, dims, leaky_slope, seed);
      metrics.push_back(r.best_metric);
    }
    const double mean = std::accumulate(metrics.begin(), metrics.end(), 0.0) /
                        static_cast<double>(metrics.size());
    rows.push_back({k, size, regime_name(regime.kind), mean, sample_stdev(metrics)});
  }
  return rows;
}

std::vector<GeneralizationRow> generalization_sweep(
    const std::vector<GnnModel>& models_per_seed, int k_train,
    const std::vector<std::pair<int, const std::vector<TrainSample>*>>& test_sets,
    const std::string& regime, const SystemParams& sys) {
  std::vector<GeneralizationRow> rows;
  for (const auto& [k_test, set] : test_sets) {
    std::vector<double> metrics;
    metrics.reserve(models_per_seed.size());
    for (const GnnModel& model : models_per_seed) {
      metrics.push_back(evaluate(model, *set, sys).ratio_of_sums);
    }
    const double mean = std::accumulate(metrics.begin(), metrics.end(), 0.0) /
                        static_cast<double>(metrics.size());
    rows.push_back({k_train, k_test, regime, mean, sample_stdev(metrics)});
  }
  return rows;
}

double sample_stdev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace linksched
