#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "linksched/channel.hpp"
#include "linksched/errors.hpp"

using namespace linksched;

namespace {

const GeometryParams kGeom{};
const PathLossParams kPl{};

}  // namespace

TEST_CASE("derived system constants") {
  SystemParams sys;
  CHECK(sys.noise_power_dbm() == doctest::Approx(-104.0).epsilon(1e-12));
  CHECK(sys.noise_over_pmax() == doctest::Approx(std::pow(10.0, -11.4)).epsilon(1e-12));
}

TEST_CASE("path loss reference point and slopes") {
  CHECK(path_loss_db(1.0, kPl) == doctest::Approx(40.0).epsilon(1e-12));
  // Hand-evaluated: 40 + 20*log10(50) + 40*log10(2) for d = 100 m.
  CHECK(path_loss_db(100.0, kPl) == doctest::Approx(86.02059991327962).epsilon(1e-9));
}

TEST_CASE("path loss continuity at the breakpoint") {
  const double at = path_loss_db(kPl.breakpoint_m, kPl);
  const double just_after = path_loss_db(kPl.breakpoint_m * (1.0 + 1e-12), kPl);
  CHECK(std::abs(at - just_after) < 1e-6);
}

TEST_CASE("path loss strictly increases with distance") {
  Rng rng = Rng::derive(11, {0});
  for (int i = 0; i < 200; ++i) {
    const double d1 = rng.uniform(0.1, 300.0);
    const double d2 = d1 * rng.uniform(1.001, 2.0);
    CHECK(path_loss_db(d2, kPl) > path_loss_db(d1, kPl));
  }
}

TEST_CASE("path loss rejects non-positive distance") {
  CHECK_THROWS_AS(path_loss_db(0.0, kPl), DomainError);
  CHECK_THROWS_AS(path_loss_db(-3.0, kPl), DomainError);
}

TEST_CASE("single-link deployment") {
  const Deployment dep = deploy_network(1, kGeom, Rng::derive(1, {1}));
  REQUIRE(dep.k() == 1);
  CHECK(dep.tx[0].x >= 0.0);
  CHECK(dep.tx[0].x <= kGeom.area_side_m);
  CHECK(dep.rx[0].y >= 0.0);
  CHECK(dep.rx[0].y <= kGeom.area_side_m);
  const double d = distance(dep.tx[0], dep.rx[0]);
  CHECK(d >= kGeom.ring_inner_m);
  CHECK(d <= kGeom.ring_outer_m);
}

TEST_CASE("deployment is deterministic per seed") {
  const Deployment a = deploy_network(10, kGeom, Rng::derive(77, {3}));
  const Deployment b = deploy_network(10, kGeom, Rng::derive(77, {3}));
  REQUIRE(a.k() == b.k());
  for (int i = 0; i < a.k(); ++i) {
    CHECK(a.tx[i].x == b.tx[i].x);
    CHECK(a.tx[i].y == b.tx[i].y);
    CHECK(a.rx[i].x == b.rx[i].x);
    CHECK(a.rx[i].y == b.rx[i].y);
  }
}

TEST_CASE("minimum transmitter separation holds over many draws") {
  for (int s = 0; s < 10000; ++s) {
    const Deployment dep = deploy_network(4, kGeom, Rng::derive(1000, {std::uint64_t(s)}));
    double min_d = 1e18;
    for (size_t i = 0; i < dep.tx.size(); ++i) {
      for (size_t j = i + 1; j < dep.tx.size(); ++j) {
        min_d = std::min(min_d, distance(dep.tx[i], dep.tx[j]));
      }
    }
    REQUIRE(min_d >= kGeom.min_tx_sep_m);
  }
}

TEST_CASE("ring constraint holds for every pair") {
  for (int s = 0; s < 200; ++s) {
    const Deployment dep = deploy_network(6, kGeom, Rng::derive(2000, {std::uint64_t(s)}));
    for (int i = 0; i < dep.k(); ++i) {
      const double d = distance(dep.tx[i], dep.rx[i]);
      REQUIRE(d >= kGeom.ring_inner_m);
      REQUIRE(d <= kGeom.ring_outer_m);
      REQUIRE(dep.rx[i].x >= 0.0);
      REQUIRE(dep.rx[i].x <= kGeom.area_side_m);
      REQUIRE(dep.rx[i].y >= 0.0);
      REQUIRE(dep.rx[i].y <= kGeom.area_side_m);
    }
  }
}

TEST_CASE("infeasible geometry errors out") {
  GeometryParams tight = kGeom;
  tight.area_side_m = 50.0;
  tight.max_attempts = 200;
  tight.max_restarts = 5;
  CHECK_THROWS_AS(deploy_network(10, tight, Rng::derive(5, {5})), DataError);
  CHECK_THROWS_AS(deploy_network(0, kGeom, Rng::derive(5, {5})), DomainError);
}

TEST_CASE("transmitter positions are marginally uniform (chi-square 5x5)") {
  const int n = 10000;
  std::vector<int> counts(25, 0);
  for (int s = 0; s < n; ++s) {
    const Deployment dep = deploy_network(1, kGeom, Rng::derive(31337, {std::uint64_t(s)}));
    const int cx = std::min(4, static_cast<int>(dep.tx[0].x / (kGeom.area_side_m / 5.0)));
    const int cy = std::min(4, static_cast<int>(dep.tx[0].y / (kGeom.area_side_m / 5.0)));
    counts[static_cast<size_t>(5 * cy + cx)]++;
  }
  const double expected = n / 25.0;
  double stat = 0.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  // 24 dof; p > 0.001 means the statistic stays below 51.179.
  CHECK(stat < 51.179);
}

TEST_CASE("degenerate shadowing reproduces pure path loss") {
  Deployment dep;
  dep.area_side_m = 250.0;
  dep.tx = {{0.0, 0.0}, {100.0, 0.0}};
  dep.rx = {{10.0, 0.0}, {110.0, 0.0}};
  PathLossParams pl = kPl;
  pl.shadowing_std_db = 0.0;

  const ChannelRealization ch = sample_channel(dep, pl, Rng::derive(4, {4}));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double d = distance(dep.tx[static_cast<size_t>(j)], dep.rx[static_cast<size_t>(i)]);
      const double expected = std::pow(10.0, -path_loss_db(d, pl) / 10.0);
      CHECK(ch.gain_sq(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("channel sampling is deterministic per seed") {
  const Deployment dep = deploy_network(5, kGeom, Rng::derive(8, {1}));
  const ChannelRealization a = sample_channel(dep, kPl, Rng::derive(8, {2}));
  const ChannelRealization b = sample_channel(dep, kPl, Rng::derive(8, {2}));
  CHECK((a.gain_sq - b.gain_sq).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shadowing standard deviation matches the configuration") {
  // Fixed geometry, many channel draws; recover S from the gain.
  Deployment dep;
  dep.area_side_m = 250.0;
  dep.tx = {{0.0, 0.0}};
  dep.rx = {{20.0, 0.0}};
  const double pl_db = path_loss_db(20.0, kPl);

  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  Rng rng = Rng::derive(555, {0});
  for (int i = 0; i < n; ++i) {
    const ChannelRealization ch = sample_channel(dep, kPl, Rng(rng.next_u64()));
    const double s = -10.0 * std::log10(ch.gain_sq(0, 0)) - pl_db;
    sum += s;
    sumsq += s * s;
  }
  const double mean = sum / n;
  const double stdev = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(stdev - 7.0) < 0.07);
}

TEST_CASE("generated gains are positive and finite") {
  for (int s = 0; s < 100; ++s) {
    const ChannelRealization ch = generate_sample(8, kGeom, kPl, 424200 + std::uint64_t(s));
    REQUIRE(ch.gain_sq.allFinite());
    REQUIRE((ch.gain_sq.array() > 0.0).all());
  }
}

TEST_CASE("generate_sample is reproducible from the sample seed alone") {
  const ChannelRealization a = generate_sample(6, kGeom, kPl, 987654321);
  const ChannelRealization b = generate_sample(6, kGeom, kPl, 987654321);
  CHECK((a.gain_sq - b.gain_sq).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.deployment.tx[3].x == b.deployment.tx[3].x);
}
