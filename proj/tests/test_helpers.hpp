#pragma once

#include <functional>
#include <vector>

#include "linksched/channel.hpp"
#include "linksched/gnn.hpp"
#include "linksched/graph.hpp"

namespace testutil {

using namespace linksched;

inline std::vector<Eigen::MatrixXd*> param_tensors(ParamSet& p) {
  std::vector<Eigen::MatrixXd*> out;
  for (auto& l : p.layers) {
    out.push_back(&l.theta_self);
    out.push_back(&l.theta_gate);
    out.push_back(&l.theta_neigh);
  }
  out.push_back(&p.head_w);
  out.push_back(&p.head_b);
  return out;
}

/// Central finite differences (step h) of `loss_fn` w.r.t. every parameter
/// entry, compared against `analytic`; returns the max relative error with a
/// small-denominator floor.
inline double max_fd_rel_error(GnnModel& model, const GradientSet& analytic,
                               const std::function<double()>& loss_fn, double h = 1e-5,
                               double floor = 1e-5) {
  ParamSet& params = model.params;
  ParamSet analytic_copy = analytic;  // non-const tensor access
  auto tp = param_tensors(params);
  auto tg = param_tensors(analytic_copy);

  double worst = 0.0;
  for (size_t t = 0; t < tp.size(); ++t) {
    Eigen::MatrixXd& tensor = *tp[t];
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
      for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
        const double saved = tensor(r, c);
        tensor(r, c) = saved + h;
        const double up = loss_fn();
        tensor(r, c) = saved - h;
        const double down = loss_fn();
        tensor(r, c) = saved;
        const double fd = (up - down) / (2.0 * h);
        const double a = (*tg[t])(r, c);
        const double denom = std::max({std::abs(a), std::abs(fd), floor});
        worst = std::max(worst, std::abs(a - fd) / denom);
      }
    }
  }
  return worst;
}

inline InterferenceGraph random_graph(int k, std::uint64_t seed,
                                      const SystemParams& sys = SystemParams{}) {
  return build_graph(generate_sample(k, GeometryParams{}, PathLossParams{}, seed), sys);
}

}  // namespace testutil
