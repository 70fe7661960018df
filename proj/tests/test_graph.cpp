#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "linksched/errors.hpp"
#include "linksched/graph.hpp"

using namespace linksched;

namespace {

const SystemParams kSys{};

ChannelRealization make_channel(const Eigen::MatrixXd& gain_sq) {
  ChannelRealization ch;
  ch.gain_sq = gain_sq;
  return ch;
}

}  // namespace

TEST_CASE("single node graph has a sign feature and no edges") {
  const double g = 10.0 * kSys.noise_over_pmax();  // SNR > 1
  const InterferenceGraph graph = build_graph(make_channel(Eigen::MatrixXd::Constant(1, 1, g)), kSys);
  CHECK(graph.n_nodes == 1);
  CHECK(graph.edges.empty());
  CHECK(graph.node_features(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const double weak = 0.1 * kSys.noise_over_pmax();  // SNR < 1
  const InterferenceGraph graph2 =
      build_graph(make_channel(Eigen::MatrixXd::Constant(1, 1, weak)), kSys);
  CHECK(graph2.node_features(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("two links with all ratio terms equal to e") {
  const double g = std::exp(1.0) * kSys.noise_over_pmax();
  const InterferenceGraph graph = build_graph(make_channel(Eigen::MatrixXd::Constant(2, 2, g)), kSys);
  CHECK(graph.norm_z == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(graph.node_features(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(graph.node_features(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(graph.edges.size() == 2);
  CHECK(graph.edge_weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(graph.edge_weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("complete edge set without self loops") {
  const ChannelRealization ch = generate_sample(5, GeometryParams{}, PathLossParams{}, 17);
  const InterferenceGraph graph = build_graph(ch, kSys);
  REQUIRE(graph.edges.size() == 20);
  for (const auto& [u, v] : graph.edges) {
    CHECK(u != v);
    CHECK(u >= 0);
    CHECK(v < 5);
  }
}

TEST_CASE("matches an independent recomputation") {
  const ChannelRealization ch = generate_sample(4, GeometryParams{}, PathLossParams{}, 4242);
  const InterferenceGraph graph = build_graph(ch, kSys);

  // Straightforward scalar re-implementation.
  const double noise = kSys.noise_over_pmax();
  double zsq = 0.0;
  for (int v = 0; v < 4; ++v) {
    for (int u = 0; u < 4; ++u) {
      const double t = std::log(ch.gain_sq(v, u) / noise);
      zsq += t * t;
    }
  }
  const double z = std::sqrt(zsq);
  CHECK(graph.norm_z == doctest::Approx(z).epsilon(1e-12));
  for (int v = 0; v < 4; ++v) {
    const double want = std::log(ch.gain_sq(v, v) / noise) / z;
    CHECK(graph.node_features(v, 0) == doctest::Approx(want).epsilon(1e-12));
  }
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [u, v] = graph.edges[e];
    const double want = std::log(ch.gain_sq(v, u) / noise) / z;
    CHECK(graph.edge_weights[static_cast<int>(e)] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("normalized log-terms have unit Euclidean norm") {
  for (int s = 0; s < 20; ++s) {
    const ChannelRealization ch =
        generate_sample(6, GeometryParams{}, PathLossParams{}, 100 + std::uint64_t(s));
    const InterferenceGraph graph = build_graph(ch, kSys);
    double norm_sq = graph.node_features.array().square().sum();
    norm_sq += graph.edge_weights.array().square().sum();
    CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("features are invariant to the logarithm base") {
  const ChannelRealization ch = generate_sample(4, GeometryParams{}, PathLossParams{}, 5150);
  const InterferenceGraph graph = build_graph(ch, kSys);

  // Same computation with base-10 logs; the normalization cancels the base.
  const double noise = kSys.noise_over_pmax();
  double zsq = 0.0;
  for (int v = 0; v < 4; ++v) {
    for (int u = 0; u < 4; ++u) {
      const double t = std::log10(ch.gain_sq(v, u) / noise);
      zsq += t * t;
    }
  }
  const double z10 = std::sqrt(zsq);
  for (int v = 0; v < 4; ++v) {
    const double want = std::log10(ch.gain_sq(v, v) / noise) / z10;
    CHECK(graph.node_features(v, 0) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("permutation relabels features and edges consistently") {
  const ChannelRealization ch = generate_sample(5, GeometryParams{}, PathLossParams{}, 999);
  const InterferenceGraph graph = build_graph(ch, kSys);
  const std::vector<int> perm = {3, 0, 4, 1, 2};

  // Permute the channel itself and rebuild.
  ChannelRealization pch = ch;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      pch.gain_sq(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) = ch.gain_sq(i, j);
    }
  }
  const InterferenceGraph rebuilt = build_graph(pch, kSys);
  const InterferenceGraph relabeled = permute_graph(graph, perm);

  CHECK(rebuilt.norm_z == doctest::Approx(graph.norm_z).epsilon(1e-12));
  CHECK((rebuilt.node_features - relabeled.node_features).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((rebuilt.in_weights - relabeled.in_weights).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((rebuilt.in_weight_sum - relabeled.in_weight_sum).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stronger direct gain raises the un-normalized node feature") {
  ChannelRealization ch = generate_sample(4, GeometryParams{}, PathLossParams{}, 321);
  const InterferenceGraph before = build_graph(ch, kSys);
  ch.gain_sq(2, 2) *= 10.0;
  const InterferenceGraph after = build_graph(ch, kSys);
  CHECK(after.node_features(2, 0) * after.norm_z > before.node_features(2, 0) * before.norm_z);
}

TEST_CASE("invalid inputs are rejected") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(2, 2, 1e-9);
  g(0, 1) = 0.0;
  CHECK_THROWS_AS(build_graph(make_channel(g), kSys), DomainError);

  // All SNR/INR terms exactly 1 make the normalization degenerate.
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(2, 2, kSys.noise_over_pmax());
  CHECK_THROWS_AS(build_graph(make_channel(ones), kSys), NumericError);
}

TEST_CASE("dense caches mirror the edge list") {
  const ChannelRealization ch = generate_sample(4, GeometryParams{}, PathLossParams{}, 2024);
  const InterferenceGraph graph = build_graph(ch, kSys);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(4, 4);
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [u, v] = graph.edges[e];
    dense(v, u) = graph.edge_weights[static_cast<int>(e)];
  }
  CHECK((dense - graph.in_weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((dense.rowwise().sum() - graph.in_weight_sum).cwiseAbs().maxCoeff() == 0.0);
}
