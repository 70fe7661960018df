#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksched/gnn.hpp"
#include "linksched/losses.hpp"

namespace linksched {

enum class RegimeKind {
  kSupervised,
  kUnsupervised,
  kSslThenSupervised,
  kSslThenUnsupervised,
};

std::string regime_name(RegimeKind kind);
RegimeKind parse_regime(const std::string& name);
bool regime_has_ssl(RegimeKind kind);
/// Main-phase loss of the regime (supervised or unsupervised).
RegimeKind regime_main_phase(RegimeKind kind);
bool regime_needs_labels(RegimeKind kind);

struct TrainingRegime {
  RegimeKind kind = RegimeKind::kSupervised;
  int epochs = 500;
  int ssl_epochs = 100;
  double tau = 0.1;
  double lr = 1e-2;
  int batch_size = 32;
  AugmentParams aug;
};

/// One dataset sample prepared for training/evaluation.
struct TrainSample {
  ChannelRealization channel;
  InterferenceGraph graph;
  bool has_label = false;
  std::vector<std::uint8_t> label;
  double opt_sum_rate = 0.0;
};

struct EpochRow {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_metric = 0.0;
};

struct TrainResult {
  GnnModel final_model;
  GnnModel best_model;
  int best_epoch = 0;  // 1-based; 0 when no main epochs ran
  double best_metric = 0.0;
  std::vector<EpochRow> log;
};

/// Full training: optional contrastive pre-training (backbone only, fresh
/// optimizer afterwards) followed by the main supervised/unsupervised phase.
/// Each epoch shuffles with a seed derived from (run_seed, epoch), then logs
/// the train loss and the normalized test sum-rate. Deterministic for fixed
/// arguments. Throws NumericError with epoch/batch diagnostics on a
/// non-finite loss.
TrainResult train(const std::vector<TrainSample>& train_set,
                  const std::vector<TrainSample>& test_set, const TrainingRegime& regime,
                  const SystemParams& sys, const std::vector<int>& dims, double leaky_slope,
                  std::uint64_t run_seed);

}  // namespace linksched
