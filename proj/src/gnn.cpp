#include "linksched/gnn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::MatrixXd leaky(const Eigen::MatrixXd& z, double slope) {
  return z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

// Subgradient at exactly zero is the negative slope.
Eigen::MatrixXd leaky_deriv(const Eigen::MatrixXd& z, double slope) {
  return z.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; });
}

// z = x * self + diag(wsum) * (x * gate) - agg * neigh with
// agg = blockdiag(in_w) * x.
void layer_preact(const Eigen::MatrixXd& x, const GraphBatch& b, const LayerParams& p,
                  Eigen::MatrixXd& agg, Eigen::MatrixXd& z) {
  agg.resize(x.rows(), x.cols());
  for (int g = 0; g < b.n_graphs(); ++g) {
    const int off = b.offsets[static_cast<size_t>(g)];
    const int k = b.graph_size(g);
    agg.middleRows(off, k).noalias() = b.in_w[static_cast<size_t>(g)] * x.middleRows(off, k);
  }
  z.noalias() = x * p.theta_self;
  z.noalias() += b.wsum.asDiagonal() * (x * p.theta_gate).eval();
  z.noalias() -= agg * p.theta_neigh;
}

void check_model_shapes(const GnnModel& m) {
  const int n_layers = m.n_layers();
  if (static_cast<int>(m.dims.size()) != n_layers + 1) {
    throw DimensionError("gnn: dims/layer count mismatch");
  }
  for (int l = 0; l < n_layers; ++l) {
    const auto& lp = m.params.layers[static_cast<size_t>(l)];
    const int fin = m.dims[static_cast<size_t>(l)];
    const int fout = m.dims[static_cast<size_t>(l) + 1];
    for (const Eigen::MatrixXd* t : {&lp.theta_self, &lp.theta_gate, &lp.theta_neigh}) {
      if (t->rows() != fin || t->cols() != fout) {
        throw DimensionError("gnn: layer " + std::to_string(l) + " parameter shape mismatch");
      }
    }
  }
  if (m.params.head_w.rows() != m.dims.back() || m.params.head_w.cols() != 1 ||
      m.params.head_b.rows() != 1 || m.params.head_b.cols() != 1) {
    throw DimensionError("gnn: head shape mismatch");
  }
}

std::vector<Eigen::MatrixXd*> tensor_ptrs(ParamSet& p) {
  std::vector<Eigen::MatrixXd*> out;
  out.reserve(p.layers.size() * 3 + 2);
  for (auto& l : p.layers) {
    out.push_back(&l.theta_self);
    out.push_back(&l.theta_gate);
    out.push_back(&l.theta_neigh);
  }
  out.push_back(&p.head_w);
  out.push_back(&p.head_b);
  return out;
}

std::vector<const Eigen::MatrixXd*> tensor_ptrs(const ParamSet& p) {
  std::vector<const Eigen::MatrixXd*> out;
  out.reserve(p.layers.size() * 3 + 2);
  for (const auto& l : p.layers) {
    out.push_back(&l.theta_self);
    out.push_back(&l.theta_gate);
    out.push_back(&l.theta_neigh);
  }
  out.push_back(&p.head_w);
  out.push_back(&p.head_b);
  return out;
}

std::vector<std::string> tensor_names(const ParamSet& p) {
  std::vector<std::string> out;
  for (size_t l = 0; l < p.layers.size(); ++l) {
    const std::string base = "layer" + std::to_string(l) + ".";
    out.push_back(base + "self");
    out.push_back(base + "gate");
    out.push_back(base + "neigh");
  }
  out.push_back("head.w");
  out.push_back("head.b");
  return out;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Runs the layer stack backward. `dx` carries dLoss/dX_l on entry for l = L.
void backward_layers(const ForwardTrace& trace, const GraphBatch& batch, const GnnModel& model,
                     Eigen::MatrixXd dx, GradientSet& accum, Eigen::MatrixXd* dloss_dx0) {
  const int n_layers = model.n_layers();
  for (int l = n_layers; l >= 1; --l) {
    const Eigen::MatrixXd& z = trace.preacts[static_cast<size_t>(l) - 1];
    const Eigen::MatrixXd gz = dx.cwiseProduct(leaky_deriv(z, model.leaky_slope));
    const Eigen::MatrixXd& xprev = trace.acts[static_cast<size_t>(l) - 1];
    const Eigen::MatrixXd& agg = trace.aggs[static_cast<size_t>(l) - 1];
    const LayerParams& lp = model.params.layers[static_cast<size_t>(l) - 1];
    LayerParams& gl = accum.layers[static_cast<size_t>(l) - 1];

    gl.theta_self.noalias() += xprev.transpose() * gz;
    gl.theta_gate.noalias() += xprev.transpose() * (batch.wsum.asDiagonal() * gz).eval();
    gl.theta_neigh.noalias() -= agg.transpose() * gz;

    if (l > 1 || dloss_dx0 != nullptr) {
      Eigen::MatrixXd dxprev = gz * lp.theta_self.transpose();
      dxprev.noalias() += batch.wsum.asDiagonal() * (gz * lp.theta_gate.transpose()).eval();
      const Eigen::MatrixXd tmp = gz * lp.theta_neigh.transpose();
      for (int g = 0; g < batch.n_graphs(); ++g) {
        const int off = batch.offsets[static_cast<size_t>(g)];
        const int k = batch.graph_size(g);
        dxprev.middleRows(off, k).noalias() -=
            batch.in_w[static_cast<size_t>(g)].transpose() * tmp.middleRows(off, k);
      }
      dx = std::move(dxprev);
    }
  }
  if (dloss_dx0 != nullptr) {
    *dloss_dx0 = std::move(dx);
  }
}

}  // namespace

ParamSet ParamSet::zeros_like(const ParamSet& p) {
  ParamSet out;
  out.layers.resize(p.layers.size());
  for (size_t l = 0; l < p.layers.size(); ++l) {
    out.layers[l].theta_self = Eigen::MatrixXd::Zero(p.layers[l].theta_self.rows(),
                                                     p.layers[l].theta_self.cols());
    out.layers[l].theta_gate = Eigen::MatrixXd::Zero(p.layers[l].theta_gate.rows(),
                                                     p.layers[l].theta_gate.cols());
    out.layers[l].theta_neigh = Eigen::MatrixXd::Zero(p.layers[l].theta_neigh.rows(),
                                                      p.layers[l].theta_neigh.cols());
  }
  out.head_w = Eigen::MatrixXd::Zero(p.head_w.rows(), p.head_w.cols());
  out.head_b = Eigen::MatrixXd::Zero(1, 1);
  return out;
}

void ParamSet::add(const ParamSet& other) {
  auto mine = tensor_ptrs(*this);
  auto theirs = tensor_ptrs(other);
  if (mine.size() != theirs.size()) {
    throw DimensionError("ParamSet::add: tensor count mismatch");
  }
  for (size_t i = 0; i < mine.size(); ++i) {
    if (mine[i]->rows() != theirs[i]->rows() || mine[i]->cols() != theirs[i]->cols()) {
      throw DimensionError("ParamSet::add: tensor shape mismatch");
    }
    *mine[i] += *theirs[i];
  }
}

GraphBatch GraphBatch::from(const std::vector<const InterferenceGraph*>& graphs) {
  GraphBatch b;
  b.offsets.resize(graphs.size() + 1, 0);
  int total = 0;
  for (size_t g = 0; g < graphs.size(); ++g) {
    b.offsets[g] = total;
    total += graphs[g]->n_nodes;
  }
  b.offsets.back() = total;

  const int f0 = graphs.empty() ? 1 : static_cast<int>(graphs[0]->node_features.cols());
  b.x0.resize(total, f0);
  b.wsum.resize(total);
  b.in_w.reserve(graphs.size());
  for (size_t g = 0; g < graphs.size(); ++g) {
    const InterferenceGraph& gr = *graphs[g];
    if (gr.node_features.cols() != f0) {
      throw DimensionError("GraphBatch: inconsistent node feature widths");
    }
    const int off = b.offsets[g];
    b.x0.middleRows(off, gr.n_nodes) = gr.node_features;
    b.wsum.segment(off, gr.n_nodes) = gr.in_weight_sum;
    b.in_w.push_back(gr.in_weights);
  }
  return b;
}

GraphBatch GraphBatch::from(const InterferenceGraph& g) { return from({&g}); }

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> lec_layer_forward(const Eigen::MatrixXd& x_prev,
                                                              const InterferenceGraph& graph,
                                                              const LayerParams& params,
                                                              double slope) {
  if (x_prev.rows() != graph.n_nodes) {
    throw DimensionError("lec_layer_forward: feature rows != node count");
  }
  if (x_prev.cols() != params.theta_self.rows() || x_prev.cols() != params.theta_gate.rows() ||
      x_prev.cols() != params.theta_neigh.rows() ||
      params.theta_self.cols() != params.theta_gate.cols() ||
      params.theta_self.cols() != params.theta_neigh.cols()) {
    throw DimensionError("lec_layer_forward: parameter shape mismatch");
  }
  if (!x_prev.allFinite()) {
    throw NumericError("lec_layer_forward: non-finite input features");
  }

  GraphBatch b;
  b.x0 = x_prev;
  b.wsum = graph.in_weight_sum;
  b.in_w.push_back(graph.in_weights);
  b.offsets = {0, graph.n_nodes};

  Eigen::MatrixXd agg, z;
  layer_preact(x_prev, b, params, agg, z);
  return {leaky(z, slope), z};
}

ForwardTrace gnn_forward(const GraphBatch& batch, const GnnModel& model) {
  check_model_shapes(model);
  if (batch.x0.cols() != model.dims.front()) {
    throw DimensionError("gnn_forward: input feature width " + std::to_string(batch.x0.cols()) +
                         " != F0 " + std::to_string(model.dims.front()));
  }
  if (!batch.x0.allFinite()) {
    throw NumericError("gnn_forward: non-finite input features");
  }

  const int n_layers = model.n_layers();
  ForwardTrace trace;
  trace.acts.resize(static_cast<size_t>(n_layers) + 1);
  trace.preacts.resize(static_cast<size_t>(n_layers));
  trace.aggs.resize(static_cast<size_t>(n_layers));
  trace.acts[0] = batch.x0;

  for (int l = 1; l <= n_layers; ++l) {
    layer_preact(trace.acts[static_cast<size_t>(l) - 1], batch,
                 model.params.layers[static_cast<size_t>(l) - 1],
                 trace.aggs[static_cast<size_t>(l) - 1], trace.preacts[static_cast<size_t>(l) - 1]);
    trace.acts[static_cast<size_t>(l)] = leaky(trace.preacts[static_cast<size_t>(l) - 1],
                                               model.leaky_slope);
  }

  trace.head_pre = (trace.acts.back() * model.params.head_w).col(0);
  trace.head_pre.array() += model.params.head_b(0, 0);
  trace.psi = trace.head_pre.unaryExpr([](double v) { return sigmoid(v); });
  return trace;
}

ForwardTrace gnn_forward(const InterferenceGraph& graph, const GnnModel& model) {
  return gnn_forward(GraphBatch::from(graph), model);
}

Schedule threshold_schedule(const Eigen::VectorXd& psi) {
  Schedule s;
  s.binary = true;
  s.gamma = psi.unaryExpr([](double v) { return v >= 0.5 ? 1.0 : 0.0; });
  return s;
}

void gnn_backward(const ForwardTrace& trace, const GraphBatch& batch, const GnnModel& model,
                  const Eigen::VectorXd& dloss_dpsi, GradientSet& accum,
                  Eigen::MatrixXd* dloss_dx0) {
  if (dloss_dpsi.size() != trace.psi.size()) {
    throw DimensionError("gnn_backward: upstream gradient length mismatch");
  }
  const Eigen::VectorXd dp =
      (dloss_dpsi.array() * trace.psi.array() * (1.0 - trace.psi.array())).matrix();
  accum.head_w.noalias() += trace.embeddings().transpose() * dp;
  accum.head_b(0, 0) += dp.sum();
  Eigen::MatrixXd dx = dp * model.params.head_w.transpose();
  backward_layers(trace, batch, model, std::move(dx), accum, dloss_dx0);
}

void gnn_backward_embeddings(const ForwardTrace& trace, const GraphBatch& batch,
                             const GnnModel& model, const Eigen::MatrixXd& dloss_dembeddings,
                             GradientSet& accum, Eigen::MatrixXd* dloss_dx0) {
  if (dloss_dembeddings.rows() != trace.embeddings().rows() ||
      dloss_dembeddings.cols() != trace.embeddings().cols()) {
    throw DimensionError("gnn_backward_embeddings: upstream gradient shape mismatch");
  }
  backward_layers(trace, batch, model, dloss_dembeddings, accum, dloss_dx0);
}

AdamState AdamState::fresh(const GnnModel& model, const AdamParams& hp) {
  AdamState s;
  s.hp = hp;
  s.step = 0;
  s.m = ParamSet::zeros_like(model.params);
  s.v = ParamSet::zeros_like(model.params);
  return s;
}

void adam_step(GnnModel& model, const GradientSet& grads, AdamState& state) {
  auto tp = tensor_ptrs(model.params);
  auto tg = tensor_ptrs(grads);
  auto tm = tensor_ptrs(state.m);
  auto tv = tensor_ptrs(state.v);
  if (tp.size() != tg.size()) {
    throw DimensionError("adam_step: gradient tensor count mismatch");
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.hp.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.hp.beta2, static_cast<double>(state.step));

  for (size_t i = 0; i < tp.size(); ++i) {
    if (tp[i]->rows() != tg[i]->rows() || tp[i]->cols() != tg[i]->cols()) {
      throw DimensionError("adam_step: gradient shape mismatch");
    }
    Eigen::MatrixXd& m = *tm[i];
    Eigen::MatrixXd& v = *tv[i];
    const Eigen::MatrixXd& g = *tg[i];
    m = state.hp.beta1 * m + (1.0 - state.hp.beta1) * g;
    v = state.hp.beta2 * v + (1.0 - state.hp.beta2) * g.cwiseProduct(g);
    tp[i]->array() -=
        state.hp.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.hp.eps);
  }
}

GnnModel init_model(const std::vector<int>& dims, double leaky_slope, Rng rng) {
  if (dims.size() < 2) {
    throw DomainError("init_model: need at least input and one layer dimension");
  }
  for (int d : dims) {
    if (d <= 0) throw DomainError("init_model: dimensions must be positive");
  }

  GnnModel m;
  m.dims = dims;
  m.leaky_slope = leaky_slope;
  m.params.layers.resize(dims.size() - 1);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fin = dims[l];
    const int fout = dims[l + 1];
    const double bound = std::sqrt(6.0 / (fin + fout));
    auto fill = [&](Eigen::MatrixXd& t) {
      t.resize(fin, fout);
      for (int r = 0; r < fin; ++r) {
        for (int c = 0; c < fout; ++c) {
          t(r, c) = rng.uniform(-bound, bound);
        }
      }
    };
    fill(m.params.layers[l].theta_self);
    fill(m.params.layers[l].theta_gate);
    fill(m.params.layers[l].theta_neigh);
  }
  const int fl = dims.back();
  const double head_bound = std::sqrt(6.0 / (fl + 1));
  m.params.head_w.resize(fl, 1);
  for (int r = 0; r < fl; ++r) {
    m.params.head_w(r, 0) = rng.uniform(-head_bound, head_bound);
  }
  m.params.head_b = Eigen::MatrixXd::Zero(1, 1);
  return m;
}

void save_checkpoint(const std::string& path, const GnnModel& model,
                     const std::string& config_digest, const AdamState* opt_state) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("save_checkpoint: cannot open " + path);
  }
  out << "linksched-checkpoint v1\n";
  out << "digest " << (config_digest.empty() ? "-" : config_digest) << "\n";
  out << "dims";
  for (int d : model.dims) out << " " << d;
  out << "\n";
  out << "leaky_slope " << fmt17(model.leaky_slope) << "\n";

  auto write_set = [&out](const ParamSet& p, const std::string& prefix) {
    auto names = tensor_names(p);
    auto ptrs = tensor_ptrs(p);
    for (size_t i = 0; i < ptrs.size(); ++i) {
      const Eigen::MatrixXd& t = *ptrs[i];
      out << "tensor " << prefix << names[i] << " " << t.rows() << " " << t.cols() << "\n";
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.cols(); ++c) {
          if (c) out << " ";
          out << fmt17(t(r, c));
        }
        out << "\n";
      }
    }
  };
  write_set(model.params, "");

  if (opt_state != nullptr) {
    out << "adam " << opt_state->step << " " << fmt17(opt_state->hp.lr) << " "
        << fmt17(opt_state->hp.beta1) << " " << fmt17(opt_state->hp.beta2) << " "
        << fmt17(opt_state->hp.eps) << "\n";
    write_set(opt_state->m, "adam.m.");
    write_set(opt_state->v, "adam.v.");
  }
  out << "end\n";
  if (!out) {
    throw DataError("save_checkpoint: write failed for " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("load_checkpoint: cannot open " + path);
  }
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line)) {
      throw DataError("load_checkpoint: unexpected end of file in " + path);
    }
    return line;
  };

  if (next_line() != "linksched-checkpoint v1") {
    throw DataError("load_checkpoint: bad format tag in " + path);
  }

  Checkpoint ck;
  {
    std::istringstream hs(next_line());
    std::string key;
    hs >> key >> ck.config_digest;
    if (key != "digest") throw DataError("load_checkpoint: missing digest line");
    if (ck.config_digest == "-") ck.config_digest.clear();
  }
  {
    std::istringstream ds(next_line());
    std::string key;
    ds >> key;
    if (key != "dims") throw DataError("load_checkpoint: missing dims line");
    int d;
    while (ds >> d) ck.model.dims.push_back(d);
    if (ck.model.dims.size() < 2) throw DataError("load_checkpoint: bad dims");
  }
  {
    std::istringstream ls(next_line());
    std::string key;
    ls >> key >> ck.model.leaky_slope;
    if (key != "leaky_slope") throw DataError("load_checkpoint: missing leaky_slope line");
  }

  auto shape_params = [&](ParamSet& p) {
    p.layers.resize(ck.model.dims.size() - 1);
    for (size_t l = 0; l + 1 < ck.model.dims.size(); ++l) {
      const int fin = ck.model.dims[l];
      const int fout = ck.model.dims[l + 1];
      p.layers[l].theta_self.resize(fin, fout);
      p.layers[l].theta_gate.resize(fin, fout);
      p.layers[l].theta_neigh.resize(fin, fout);
    }
    p.head_w.resize(ck.model.dims.back(), 1);
    p.head_b.resize(1, 1);
  };

  auto read_set = [&](ParamSet& p, const std::string& prefix) {
    shape_params(p);
    auto names = tensor_names(p);
    auto ptrs = tensor_ptrs(p);
    for (size_t i = 0; i < ptrs.size(); ++i) {
      std::istringstream hs(next_line());
      std::string key, name;
      Eigen::Index rows = 0, cols = 0;
      hs >> key >> name >> rows >> cols;
      if (key != "tensor" || name != prefix + names[i] || rows != ptrs[i]->rows() ||
          cols != ptrs[i]->cols()) {
        throw DataError("load_checkpoint: tensor header mismatch at " + prefix + names[i]);
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        std::istringstream vs(next_line());
        for (Eigen::Index c = 0; c < cols; ++c) {
          if (!(vs >> (*ptrs[i])(r, c))) {
            throw DataError("load_checkpoint: short value row in " + prefix + names[i]);
          }
        }
      }
    }
  };

  read_set(ck.model.params, "");

  std::string tail = next_line();
  if (tail.rfind("adam ", 0) == 0) {
    AdamState st;
    std::istringstream as(tail);
    std::string key;
    as >> key >> st.step >> st.hp.lr >> st.hp.beta1 >> st.hp.beta2 >> st.hp.eps;
    if (!as) throw DataError("load_checkpoint: bad adam line");
    read_set(st.m, "adam.m.");
    read_set(st.v, "adam.v.");
    ck.opt_state = std::move(st);
    tail = next_line();
  }
  if (tail != "end") {
    throw DataError("load_checkpoint: missing end marker in " + path);
  }
  return ck;
}

}  // namespace linksched
