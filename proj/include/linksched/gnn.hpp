#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "linksched/graph.hpp"
#include "linksched/rate.hpp"
#include "linksched/rng.hpp"

namespace linksched {

/// Per-layer parameter triple of the local extremum convolution:
///   x_v' = mu( x_v * self + sum_u e_{u,v} (x_v * gate - x_u * neigh) )
struct LayerParams {
  Eigen::MatrixXd theta_self;
  Eigen::MatrixXd theta_gate;
  Eigen::MatrixXd theta_neigh;
};

/// All trainable tensors. Doubles as the gradient and optimizer-moment
/// container since those mirror the parameter shapes exactly.
struct ParamSet {
  std::vector<LayerParams> layers;
  Eigen::MatrixXd head_w;  // F_L x 1
  Eigen::MatrixXd head_b;  // 1 x 1

  static ParamSet zeros_like(const ParamSet& p);
  void add(const ParamSet& other);

  template <typename F>
  void for_each_tensor(F&& f) {
    for (auto& l : layers) {
      f(l.theta_self);
      f(l.theta_gate);
      f(l.theta_neigh);
    }
    f(head_w);
    f(head_b);
  }

  template <typename F>
  void for_each_tensor(const F& f) const {
    const_cast<ParamSet*>(this)->for_each_tensor(
        [&](Eigen::MatrixXd& t) { f(static_cast<const Eigen::MatrixXd&>(t)); });
  }

  /// Applies f(tensor_of_this, tensor_of_other) pairwise in a fixed order.
  template <typename F>
  void zip_tensors(ParamSet& other, F&& f) {
    for (size_t l = 0; l < layers.size(); ++l) {
      f(layers[l].theta_self, other.layers[l].theta_self);
      f(layers[l].theta_gate, other.layers[l].theta_gate);
      f(layers[l].theta_neigh, other.layers[l].theta_neigh);
    }
    f(head_w, other.head_w);
    f(head_b, other.head_b);
  }
};

using GradientSet = ParamSet;

struct GnnModel {
  std::vector<int> dims;  // F0..FL
  double leaky_slope = 1e-2;
  ParamSet params;

  int n_layers() const { return static_cast<int>(params.layers.size()); }
  int embedding_dim() const { return dims.back(); }
};

/// Several interference graphs stacked into one block-diagonal structure so
/// layer GEMMs run over all nodes at once. Graphs stay independent: there are
/// no cross-graph edges.
struct GraphBatch {
  Eigen::MatrixXd x0;                  // N_total x F0
  Eigen::VectorXd wsum;                // incoming-weight sum per node
  std::vector<Eigen::MatrixXd> in_w;   // per graph: (v, u) incoming weights
  std::vector<int> offsets;            // node offset per graph, size G+1

  int total_nodes() const { return static_cast<int>(x0.rows()); }
  int n_graphs() const { return static_cast<int>(in_w.size()); }
  int graph_size(int g) const { return offsets[static_cast<size_t>(g) + 1] - offsets[static_cast<size_t>(g)]; }

  static GraphBatch from(const std::vector<const InterferenceGraph*>& graphs);
  static GraphBatch from(const InterferenceGraph& g);
};

/// Everything the backward pass needs from a forward call.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> acts;     // X0..XL
  std::vector<Eigen::MatrixXd> preacts;  // Z1..ZL
  std::vector<Eigen::MatrixXd> aggs;     // per layer: blockdiag(W) * X_{l-1}
  Eigen::VectorXd head_pre;
  Eigen::VectorXd psi;

  const Eigen::MatrixXd& embeddings() const { return acts.back(); }
};

/// One local-extremum convolution over a single graph. Returns the activated
/// features and the pre-activation cache.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lec_layer_forward(const Eigen::MatrixXd& x_prev,
                                                              const InterferenceGraph& graph,
                                                              const LayerParams& params,
                                                              double slope);

ForwardTrace gnn_forward(const GraphBatch& batch, const GnnModel& model);
ForwardTrace gnn_forward(const InterferenceGraph& graph, const GnnModel& model);

/// gamma_v = 1 iff psi_v >= 0.5.
Schedule threshold_schedule(const Eigen::VectorXd& psi);

/// Reverse-mode gradients from dLoss/dPsi, through the sigmoid head and all
/// layers. Accumulates into `accum`; optionally also returns dLoss/dX0.
void gnn_backward(const ForwardTrace& trace, const GraphBatch& batch, const GnnModel& model,
                  const Eigen::VectorXd& dloss_dpsi, GradientSet& accum,
                  Eigen::MatrixXd* dloss_dx0 = nullptr);

/// Same, but the upstream gradient lands on the embeddings and the head is
/// skipped entirely (contrastive pre-training path).
void gnn_backward_embeddings(const ForwardTrace& trace, const GraphBatch& batch,
                             const GnnModel& model, const Eigen::MatrixXd& dloss_dembeddings,
                             GradientSet& accum, Eigen::MatrixXd* dloss_dx0 = nullptr);

struct AdamParams {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamParams hp;
  std::int64_t step = 0;
  ParamSet m;
  ParamSet v;

  static AdamState fresh(const GnnModel& model, const AdamParams& hp);
};

/// Bias-corrected adaptive-moment update, applied tensor by tensor.
void adam_step(GnnModel& model, const GradientSet& grads, AdamState& state);

/// Fan-based uniform init: U(+-sqrt(6/(fan_in+fan_out))); head bias zero.
GnnModel init_model(const std::vector<int>& dims, double leaky_slope, Rng rng);

void save_checkpoint(const std::string& path, const GnnModel& model,
                     const std::string& config_digest,
                     const AdamState* opt_state = nullptr);

struct Checkpoint {
  GnnModel model;
  std::string config_digest;
  std::optional<AdamState> opt_state;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace linksched
