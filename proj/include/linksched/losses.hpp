#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "linksched/channel.hpp"
#include "linksched/graph.hpp"
#include "linksched/rng.hpp"

namespace linksched {

struct LossResult {
  double loss = 0.0;
  std::vector<Eigen::VectorXd> dpsi;  // per graph, parallel to the inputs
};

/// Cross-entropy (log base 2) between psi and the optimal binary schedules,
/// averaged over the batch. psi values are clamped to [1e-12, 1-1e-12] before
/// the logs to survive sigmoid saturation.
LossResult supervised_loss(const std::vector<Eigen::VectorXd>& psis,
                           const std::vector<const std::vector<std::uint8_t>*>& labels);

/// Negative mean sum-rate of the batch with the relaxed schedules psi. The
/// gradient covers both the direct path through each psi_v and the
/// interference paths through every denominator it appears in.
LossResult unsupervised_loss(const std::vector<Eigen::VectorXd>& psis,
                             const std::vector<const ChannelRealization*>& channels,
                             const SystemParams& sys);

struct ContrastiveResult {
  double loss = 0.0;
  Eigen::MatrixXd dview_a;
  Eigen::MatrixXd dview_b;
};

/// Contrastive loss (log base 2) over stacked node embeddings of two views.
/// Row m of emb_a and emb_b is the same node; the denominator of each term
/// runs over every second-view node in the batch, the positive included.
/// `batch_graphs` is B, the normalizer. Overflow is guarded by max
/// subtraction inside the log-sum-exp.
ContrastiveResult contrastive_loss(const Eigen::MatrixXd& emb_a, const Eigen::MatrixXd& emb_b,
                                   int batch_graphs, double tau);

struct AugmentParams {
  double perturb_min = 0.9;
  double perturb_max = 1.1;
  bool prune_enabled = true;
  double prune_quantile = 0.25;
};

/// Two graph views of the same channel; node v of view_a corresponds to node
/// v of view_b.
struct AugmentedPair {
  InterferenceGraph view_a;
  InterferenceGraph view_b;
};

/// Builds each view independently: every gain picks up a multiplicative
/// amplitude factor f ~ U[perturb_min, perturb_max] (so f^2 on |h|^2), then
/// the weakest interference edges — raw log-INR at or below the per-graph
/// quantile — are pruned. The normalization factor is recomputed per view
/// over all K^2 perturbed terms.
AugmentedPair augment(const ChannelRealization& ch, const SystemParams& sys,
                      const AugmentParams& params, Rng rng);

}  // namespace linksched
