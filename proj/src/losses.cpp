#include "linksched/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kPsiClamp = 1e-12;

// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Eigen::MatrixXd perturbed_log_terms(const ChannelRealization& ch, double noise,
                                    const AugmentParams& params, Rng& rng) {
  const int k = ch.k();
  Eigen::MatrixXd terms(k, k);
  for (int v = 0; v < k; ++v) {
    for (int u = 0; u < k; ++u) {
      const double f = rng.uniform(params.perturb_min, params.perturb_max);
      const double g = ch.gain_sq(v, u) * f * f;
      if (!(g > 0.0)) {
        throw DomainError("augment: non-positive perturbed gain");
      }
      terms(v, u) = std::log(g / noise);
    }
  }
  return terms;
}

InterferenceGraph build_view(const ChannelRealization& ch, double noise,
                             const AugmentParams& params, Rng& rng) {
  const Eigen::MatrixXd terms = perturbed_log_terms(ch, noise, params, rng);
  const int k = ch.k();
  std::optional<double> threshold;
  if (params.prune_enabled && k > 1) {
    std::vector<double> inr_terms;
    inr_terms.reserve(static_cast<size_t>(k) * (k - 1));
    for (int v = 0; v < k; ++v) {
      for (int u = 0; u < k; ++u) {
        if (u != v) inr_terms.push_back(terms(v, u));
      }
    }
    threshold = quantile(std::move(inr_terms), params.prune_quantile);
  }
  return graph_from_log_terms(terms, threshold);
}

}  // namespace

LossResult supervised_loss(const std::vector<Eigen::VectorXd>& psis,
                           const std::vector<const std::vector<std::uint8_t>*>& labels) {
  if (psis.size() != labels.size()) {
    throw DimensionError("supervised_loss: psi/label batch size mismatch");
  }
  if (psis.empty()) {
    throw DimensionError("supervised_loss: empty batch");
  }

  const double batch = static_cast<double>(psis.size());
  LossResult out;
  out.dpsi.resize(psis.size());

  double total = 0.0;
  for (size_t i = 0; i < psis.size(); ++i) {
    if (labels[i] == nullptr) {
      throw DataError("supervised_loss: missing labels in batch");
    }
    const Eigen::VectorXd& psi = psis[i];
    const std::vector<std::uint8_t>& lab = *labels[i];
    if (static_cast<int>(lab.size()) != psi.size()) {
      throw DimensionError("supervised_loss: label length mismatch");
    }
    Eigen::VectorXd& grad = out.dpsi[i];
    grad.resize(psi.size());
    for (int v = 0; v < psi.size(); ++v) {
      const double p = std::clamp(psi[v], kPsiClamp, 1.0 - kPsiClamp);
      const double y = lab[static_cast<size_t>(v)] ? 1.0 : 0.0;
      total += y * std::log2(p) + (1.0 - y) * std::log2(1.0 - p);
      grad[v] = -(y / p - (1.0 - y) / (1.0 - p)) / (batch * kLn2);
    }
  }
  out.loss = -total / batch;
  return out;
}

LossResult unsupervised_loss(const std::vector<Eigen::VectorXd>& psis,
                             const std::vector<const ChannelRealization*>& channels,
                             const SystemParams& sys) {
  if (psis.size() != channels.size()) {
    throw DimensionError("unsupervised_loss: psi/channel batch size mismatch");
  }
  if (psis.empty()) {
    throw DimensionError("unsupervised_loss: empty batch");
  }

  const double batch = static_cast<double>(psis.size());
  const double noise = sys.noise_over_pmax();
  LossResult out;
  out.dpsi.resize(psis.size());

  double total = 0.0;
  for (size_t i = 0; i < psis.size(); ++i) {
    const Eigen::VectorXd& psi = psis[i];
    const Eigen::MatrixXd& g = channels[i]->gain_sq;
    const int k = channels[i]->k();
    if (psi.size() != k) {
      throw DimensionError("unsupervised_loss: psi length != K");
    }
    Eigen::VectorXd& grad = out.dpsi[i];
    grad = Eigen::VectorXd::Zero(k);

    for (int v = 0; v < k; ++v) {
      double interference = 0.0;
      for (int u = 0; u < k; ++u) {
        if (u != v) interference += g(v, u) * psi[u];
      }
      const double denom = interference + noise;
      const double numer = g(v, v) * psi[v];
      total += std::log2(1.0 + numer / denom);

      // d r_v / d psi_v and d r_v / d psi_u for every interferer u.
      const double dr_dv = g(v, v) / (kLn2 * (denom + numer));
      grad[v] -= dr_dv / batch;
      const double scale = numer / (kLn2 * denom * (denom + numer));
      for (int u = 0; u < k; ++u) {
        if (u != v) grad[u] += scale * g(v, u) / batch;
      }
    }
  }
  out.loss = -total / batch;
  return out;
}

ContrastiveResult contrastive_loss(const Eigen::MatrixXd& emb_a, const Eigen::MatrixXd& emb_b,
                                   int batch_graphs, double tau) {
  if (!(tau > 0.0)) {
    throw DomainError("contrastive_loss: tau must be positive");
  }
  if (emb_a.rows() != emb_b.rows() || emb_a.cols() != emb_b.cols()) {
    throw DimensionError("contrastive_loss: view embedding shapes differ");
  }
  if (emb_a.rows() == 0 || batch_graphs <= 0) {
    throw DimensionError("contrastive_loss: empty batch");
  }

  const int m = static_cast<int>(emb_a.rows());
  const double batch = static_cast<double>(batch_graphs);

  Eigen::MatrixXd scores = (emb_a * emb_b.transpose()) / tau;

  double total = 0.0;
  Eigen::MatrixXd softmax(m, m);
  for (int a = 0; a < m; ++a) {
    const Eigen::VectorXd row = scores.row(a).transpose();
    const double mx = row.maxCoeff();
    const Eigen::ArrayXd ex = (row.array() - mx).exp();
    const double sum = ex.sum();
    total += (scores(a, a) - (mx + std::log(sum))) / kLn2;
    softmax.row(a) = (ex / sum).matrix().transpose();
  }

  ContrastiveResult out;
  out.loss = -total / batch;

  // dLoss/dscores(a,c) = -(delta_{a=c} - softmax(a,c)) / (B ln2); scores are
  // bilinear in the views, so one GEMM per side finishes the chain rule.
  Eigen::MatrixXd dscores = softmax;
  dscores.diagonal().array() -= 1.0;
  dscores /= batch * kLn2 * tau;
  out.dview_a = dscores * emb_b;
  out.dview_b = dscores.transpose() * emb_a;
  return out;
}

AugmentedPair augment(const ChannelRealization& ch, const SystemParams& sys,
                      const AugmentParams& params, Rng rng) {
  if (!(params.perturb_min <= params.perturb_max) || !(params.perturb_min > 0.0)) {
    throw DomainError("augment: bad perturbation interval");
  }
  const double noise = sys.noise_over_pmax();
  AugmentedPair pair;
  pair.view_a = build_view(ch, noise, params, rng);
  pair.view_b = build_view(ch, noise, params, rng);
  return pair;
}

}  // namespace linksched
