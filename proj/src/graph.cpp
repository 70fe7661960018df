#include "linksched/graph.hpp"

#include <cmath>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

void InterferenceGraph::finalize() {
  in_weights = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    in_weights(v, u) = edge_weights[static_cast<int>(e)];
  }
  in_weight_sum = in_weights.rowwise().sum();
}

InterferenceGraph graph_from_log_terms(const Eigen::MatrixXd& log_terms,
                                       std::optional<double> prune_below) {
  const int k = static_cast<int>(log_terms.rows());
  const double z = std::sqrt(log_terms.array().square().sum());
  if (!(z > 0.0)) {
    throw NumericError("graph_from_log_terms: degenerate normalization (all SNR/INR terms are 1)");
  }

  InterferenceGraph g;
  g.n_nodes = k;
  g.norm_z = z;
  g.node_features = log_terms.diagonal() / z;  // K x 1

  g.edges.reserve(static_cast<size_t>(k) * std::max(k - 1, 0));
  std::vector<double> weights;
  weights.reserve(g.edges.capacity());
  for (int u = 0; u < k; ++u) {
    for (int v = 0; v < k; ++v) {
      if (u == v) continue;
      if (prune_below && log_terms(v, u) <= *prune_below) continue;
      g.edges.emplace_back(u, v);
      weights.push_back(log_terms(v, u) / z);
    }
  }
  g.edge_weights = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<int>(weights.size()));
  g.finalize();
  return g;
}

InterferenceGraph build_graph(const ChannelRealization& ch, const SystemParams& sys) {
  const int k = ch.k();
  const double noise = sys.noise_over_pmax();

  // log_terms(v, u) = ln(P_max |h_vu|^2 / N); the diagonal feeds node
  // features, off-diagonal entries the edge weights.
  Eigen::MatrixXd log_terms(k, k);
  for (int v = 0; v < k; ++v) {
    for (int u = 0; u < k; ++u) {
      const double g = ch.gain_sq(v, u);
      if (!(g > 0.0) || !std::isfinite(g)) {
        throw DomainError("build_graph: non-positive gain at (" + std::to_string(v) + "," +
                          std::to_string(u) + ")");
      }
      log_terms(v, u) = std::log(g / noise);
    }
  }
  return graph_from_log_terms(log_terms);
}

InterferenceGraph permute_graph(const InterferenceGraph& g, const std::vector<int>& perm) {
  InterferenceGraph out;
  out.n_nodes = g.n_nodes;
  out.norm_z = g.norm_z;
  out.node_features.resize(g.node_features.rows(), g.node_features.cols());
  for (int v = 0; v < g.n_nodes; ++v) {
    out.node_features.row(perm[static_cast<size_t>(v)]) = g.node_features.row(v);
  }
  out.edges.reserve(g.edges.size());
  out.edge_weights.resize(g.edge_weights.size());
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto [u, v] = g.edges[e];
    out.edges.emplace_back(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)]);
    out.edge_weights[static_cast<int>(e)] = g.edge_weights[static_cast<int>(e)];
  }
  out.finalize();
  return out;
}

}  // namespace linksched
