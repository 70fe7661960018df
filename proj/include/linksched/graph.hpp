#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "linksched/channel.hpp"

namespace linksched {

/// Directed interference graph. Node features hold the normalized log-SNR of
/// each link; edge (u, v) carries the normalized log-INR from Tx_u into Rx_v.
/// `build_graph` produces the complete graph over all ordered pairs;
/// augmentation may prune edges, so the edge list is explicit.
struct InterferenceGraph {
  int n_nodes = 0;
  Eigen::MatrixXd node_features;              // K x F0 (F0 = 1)
  std::vector<std::pair<int, int>> edges;     // ordered (u, v), u != v
  Eigen::VectorXd edge_weights;               // parallel to `edges`
  double norm_z = 0.0;

  // Dense caches used by the GNN layers: in_weights(v, u) is the weight of
  // edge (u, v) or 0 when absent; in_weight_sum(v) is its row sum.
  Eigen::MatrixXd in_weights;
  Eigen::VectorXd in_weight_sum;

  /// Rebuilds the dense caches from `edges` / `edge_weights`.
  void finalize();
};

/// Normalized SNR/INR graph of a channel realization. Natural log is used for
/// the log-ratio terms; the normalization makes the features invariant to the
/// base choice. Throws DomainError on non-positive gains and NumericError when
/// the normalization factor degenerates to zero.
InterferenceGraph build_graph(const ChannelRealization& ch, const SystemParams& sys);

/// Core constructor shared with augmentation: log_terms(v, u) holds
/// ln(P_max |h_vu|^2 / N). Edges whose raw log-INR is <= `prune_below` are
/// dropped; the normalization always sums over all K^2 terms.
InterferenceGraph graph_from_log_terms(const Eigen::MatrixXd& log_terms,
                                       std::optional<double> prune_below = std::nullopt);

/// Graph with nodes relabeled by `perm` (node v becomes perm[v]).
InterferenceGraph permute_graph(const InterferenceGraph& g, const std::vector<int>& perm);

}  // namespace linksched
