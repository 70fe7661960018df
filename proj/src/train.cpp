#include "linksched/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "linksched/errors.hpp"
#include "linksched/eval.hpp"

namespace linksched {

std::string regime_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::kSupervised: return "supervised";
    case RegimeKind::kUnsupervised: return "unsupervised";
    case RegimeKind::kSslThenSupervised: return "ssl_then_supervised";
    case RegimeKind::kSslThenUnsupervised: return "ssl_then_unsupervised";
  }
  throw ConfigError("regime_name: unknown regime");
}

RegimeKind parse_regime(const std::string& name) {
  if (name == "supervised") return RegimeKind::kSupervised;
  if (name == "unsupervised") return RegimeKind::kUnsupervised;
  if (name == "ssl_then_supervised") return RegimeKind::kSslThenSupervised;
  if (name == "ssl_then_unsupervised") return RegimeKind::kSslThenUnsupervised;
  throw ConfigError("unknown regime '" + name +
                    "' (expected supervised, unsupervised, ssl_then_supervised, or "
                    "ssl_then_unsupervised)");
}

bool regime_has_ssl(RegimeKind kind) {
  return kind == RegimeKind::kSslThenSupervised || kind == RegimeKind::kSslThenUnsupervised;
}

RegimeKind regime_main_phase(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::kSslThenSupervised: return RegimeKind::kSupervised;
    case RegimeKind::kSslThenUnsupervised: return RegimeKind::kUnsupervised;
    default: return kind;
  }
}

bool regime_needs_labels(RegimeKind kind) {
  return regime_main_phase(kind) == RegimeKind::kSupervised;
}

namespace {

std::vector<int> shuffled_indices(int n, Rng rng) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

std::vector<Eigen::VectorXd> split_psi(const Eigen::VectorXd& psi, const GraphBatch& batch) {
  std::vector<Eigen::VectorXd> out(static_cast<size_t>(batch.n_graphs()));
  for (int g = 0; g < batch.n_graphs(); ++g) {
    out[static_cast<size_t>(g)] =
        psi.segment(batch.offsets[static_cast<size_t>(g)], batch.graph_size(g));
  }
  return out;
}

Eigen::VectorXd concat_dpsi(const std::vector<Eigen::VectorXd>& dpsi, const GraphBatch& batch) {
  Eigen::VectorXd out(batch.total_nodes());
  for (int g = 0; g < batch.n_graphs(); ++g) {
    out.segment(batch.offsets[static_cast<size_t>(g)], batch.graph_size(g)) =
        dpsi[static_cast<size_t>(g)];
  }
  return out;
}

// Stream sub-tags separating the two training phases.
constexpr std::uint64_t kSslPhase = 1;
constexpr std::uint64_t kMainPhase = 2;

void check_finite_loss(double loss, const char* phase, int epoch, int batch_index) {
  if (!std::isfinite(loss)) {
    throw NumericError(std::string("train: non-finite ") + phase + " loss " +
                       std::to_string(loss) + " at epoch " + std::to_string(epoch) + ", batch " +
                       std::to_string(batch_index));
  }
}

}  // namespace

TrainResult train(const std::vector<TrainSample>& train_set,
                  const std::vector<TrainSample>& test_set, const TrainingRegime& regime,
                  const SystemParams& sys, const std::vector<int>& dims, double leaky_slope,
                  std::uint64_t run_seed) {
  if (train_set.empty()) {
    throw DataError("train: empty training set");
  }
  if (regime_needs_labels(regime.kind)) {
    for (const TrainSample& s : train_set) {
      if (!s.has_label) {
        throw DataError("train: regime " + regime_name(regime.kind) +
                        " requires labeled training samples");
      }
    }
  }
  for (const TrainSample& s : test_set) {
    if (!s.has_label) {
      throw DataError("train: test samples must be labeled (metric normalization)");
    }
  }
  if (test_set.empty()) {
    throw DataError("train: empty test set");
  }
  if (regime.batch_size < 1 || regime.epochs < 0 || regime.ssl_epochs < 0) {
    throw ConfigError("train: bad epoch/batch settings");
  }

  GnnModel model = init_model(dims, leaky_slope, Rng::derive(run_seed, {stream::kModelInit}));
  const int n = static_cast<int>(train_set.size());
  const bool supervised = regime_main_phase(regime.kind) == RegimeKind::kSupervised;

  // --- Contrastive pre-training: embeddings only, so only the backbone
  // parameters pick up gradient; the head stays at its initialization.
  if (regime_has_ssl(regime.kind)) {
    AdamState opt = AdamState::fresh(model, AdamParams{regime.lr, 0.9, 0.999, 1e-8});
    for (int epoch = 1; epoch <= regime.ssl_epochs; ++epoch) {
      const std::vector<int> order = shuffled_indices(
          n, Rng::derive(run_seed, {stream::kShuffle, kSslPhase, std::uint64_t(epoch)}));
      int batch_index = 0;
      for (int start = 0; start < n; start += regime.batch_size, ++batch_index) {
        const int b = std::min(regime.batch_size, n - start);
        std::vector<AugmentedPair> pairs;
        pairs.reserve(static_cast<size_t>(b));
        for (int s = 0; s < b; ++s) {
          const int idx = order[static_cast<size_t>(start + s)];
          pairs.push_back(augment(
              train_set[static_cast<size_t>(idx)].channel, sys, regime.aug,
              Rng::derive(run_seed,
                          {stream::kAugment, std::uint64_t(epoch), std::uint64_t(idx)})));
        }
        std::vector<const InterferenceGraph*> view_a, view_b;
        view_a.reserve(pairs.size());
        view_b.reserve(pairs.size());
        for (const AugmentedPair& p : pairs) {
          view_a.push_back(&p.view_a);
          view_b.push_back(&p.view_b);
        }
        const GraphBatch ga = GraphBatch::from(view_a);
        const GraphBatch gb = GraphBatch::from(view_b);
        const ForwardTrace tra = gnn_forward(ga, model);
        const ForwardTrace trb = gnn_forward(gb, model);
        const ContrastiveResult cr =
            contrastive_loss(tra.embeddings(), trb.embeddings(), b, regime.tau);
        check_finite_loss(cr.loss, "contrastive", epoch, batch_index);

        GradientSet grads = ParamSet::zeros_like(model.params);
        gnn_backward_embeddings(tra, ga, model, cr.dview_a, grads);
        gnn_backward_embeddings(trb, gb, model, cr.dview_b, grads);
        adam_step(model, grads, opt);
      }
    }
  }

  // --- Main phase with a fresh optimizer.
  TrainResult result;
  result.best_model = model;
  result.best_epoch = 0;
  result.best_metric = std::numeric_limits<double>::quiet_NaN();

  AdamState opt = AdamState::fresh(model, AdamParams{regime.lr, 0.9, 0.999, 1e-8});
  for (int epoch = 1; epoch <= regime.epochs; ++epoch) {
    const std::vector<int> order = shuffled_indices(
        n, Rng::derive(run_seed, {stream::kShuffle, kMainPhase, std::uint64_t(epoch)}));
    double loss_weighted = 0.0;
    int batch_index = 0;
    for (int start = 0; start < n; start += regime.batch_size, ++batch_index) {
      const int b = std::min(regime.batch_size, n - start);
      std::vector<const InterferenceGraph*> graphs;
      std::vector<const ChannelRealization*> channels;
      std::vector<const std::vector<std::uint8_t>*> labels;
      graphs.reserve(static_cast<size_t>(b));
      channels.reserve(static_cast<size_t>(b));
      labels.reserve(static_cast<size_t>(b));
      for (int s = 0; s < b; ++s) {
        const TrainSample& sample = train_set[static_cast<size_t>(order[static_cast<size_t>(start + s)])];
        graphs.push_back(&sample.graph);
        channels.push_back(&sample.channel);
        labels.push_back(sample.has_label ? &sample.label : nullptr);
      }

      const GraphBatch gb = GraphBatch::from(graphs);
      const ForwardTrace trace = gnn_forward(gb, model);
      const std::vector<Eigen::VectorXd> psis = split_psi(trace.psi, gb);
      const LossResult lr = supervised ? supervised_loss(psis, labels)
                                       : unsupervised_loss(psis, channels, sys);
      check_finite_loss(lr.loss, supervised ? "supervised" : "unsupervised", epoch, batch_index);
      loss_weighted += lr.loss * b;

      GradientSet grads = ParamSet::zeros_like(model.params);
      gnn_backward(trace, gb, model, concat_dpsi(lr.dpsi, gb), grads);
      adam_step(model, grads, opt);
    }

    const double train_loss = loss_weighted / n;
    const double metric = evaluate(model, test_set, sys).ratio_of_sums;
    result.log.push_back({epoch, train_loss, metric});
    if (std::isnan(result.best_metric) || metric > result.best_metric) {
      result.best_metric = metric;
      result.best_epoch = epoch;
      result.best_model = model;
    }
  }

  result.final_model = std::move(model);
  return result;
}

}  // namespace linksched
