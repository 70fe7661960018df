#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "linksched/errors.hpp"
#include "linksched/rate.hpp"

using namespace linksched;

namespace {

ChannelRealization make_channel(const Eigen::MatrixXd& gain_sq) {
  ChannelRealization ch;
  ch.gain_sq = gain_sq;
  return ch;
}

const SystemParams kSys{};

}  // namespace

TEST_CASE("all-off schedule yields zero rates") {
  const ChannelRealization ch = generate_sample(5, GeometryParams{}, PathLossParams{}, 1);
  const Eigen::VectorXd r = link_rates(ch, Schedule::all_off(5), kSys);
  CHECK(r.cwiseAbs().maxCoeff() == 0.0);
  CHECK(sum_rate(ch, Schedule::all_off(5), kSys) == 0.0);
}

TEST_CASE("single link rate has no interference term") {
  const double g = 1e-8;
  const ChannelRealization ch = make_channel(Eigen::MatrixXd::Constant(1, 1, g));
  const Eigen::VectorXd r = link_rates(ch, Schedule::all_on(1), kSys);
  CHECK(r[0] == doctest::Approx(std::log2(1.0 + g / kSys.noise_over_pmax())).epsilon(1e-12));
}

TEST_CASE("two-link symmetric rates match direct evaluation") {
  Eigen::MatrixXd g(2, 2);
  g << 1e-9, 1e-10, 1e-10, 1e-9;
  const ChannelRealization ch = make_channel(g);
  const Eigen::VectorXd r = link_rates(ch, Schedule::all_on(2), kSys);
  const double expected = std::log2(1.0 + 1e-9 / (1e-10 + std::pow(10.0, -11.4)));
  CHECK(r[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("near-diagonal channel sums per-link capacities") {
  const int k = 4;
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(k, k, 1e-30);
  for (int i = 0; i < k; ++i) g(i, i) = 1e-8 * (i + 1);
  const ChannelRealization ch = make_channel(g);
  double expected = 0.0;
  for (int i = 0; i < k; ++i) expected += std::log2(1.0 + g(i, i) / kSys.noise_over_pmax());
  CHECK(sum_rate(ch, Schedule::all_on(k), kSys) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("sum rate equals the sum of link rates exactly") {
  for (int s = 0; s < 20; ++s) {
    const ChannelRealization ch =
        generate_sample(6, GeometryParams{}, PathLossParams{}, 100 + std::uint64_t(s));
    Rng rng = Rng::derive(9, {std::uint64_t(s)});
    Eigen::VectorXd psi(6);
    for (int i = 0; i < 6; ++i) psi[i] = rng.uniform();
    const Schedule sched = Schedule::relaxed(psi);
    CHECK(sum_rate(ch, sched, kSys) == link_rates(ch, sched, kSys).sum());
  }
}

TEST_CASE("schedule length mismatch raises a dimension error") {
  const ChannelRealization ch = generate_sample(4, GeometryParams{}, PathLossParams{}, 5);
  CHECK_THROWS_AS(link_rates(ch, Schedule::all_on(5), kSys), DimensionError);
}

TEST_CASE("relaxed evaluation at binary corners equals binary evaluation") {
  const ChannelRealization ch = generate_sample(5, GeometryParams{}, PathLossParams{}, 321);
  Schedule binary = Schedule::from_bits({1, 0, 1, 1, 0});
  Schedule relaxed = Schedule::relaxed(binary.gamma);
  const Eigen::VectorXd rb = link_rates(ch, binary, kSys);
  const Eigen::VectorXd rr = link_rates(ch, relaxed, kSys);
  CHECK((rb - rr).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exhaustive search on a single link turns it on") {
  const ChannelRealization ch = make_channel(Eigen::MatrixXd::Constant(1, 1, 1e-9));
  const LabeledSample out = exhaustive_search(ch, kSys);
  CHECK(out.optimal_schedule.gamma[0] == 1.0);
  CHECK(out.evaluated_schedules == 2);
}

TEST_CASE("diagonal channel turns every link on") {
  const int k = 6;
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(k, k, 1e-30);
  for (int i = 0; i < k; ++i) g(i, i) = 1e-8;
  const LabeledSample out = exhaustive_search(make_channel(g), kSys);
  CHECK(out.optimal_schedule.gamma.minCoeff() == 1.0);
  CHECK(out.evaluated_schedules == 64);
}

TEST_CASE("symmetric two-link tie resolves to the documented order") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(2, 2, 1e-9);
  const ChannelRealization ch = make_channel(g);

  // Enumerate the four candidates independently: the two single-link
  // schedules dominate and tie exactly by symmetry.
  const double single = sum_rate(ch, Schedule::from_bits({0, 1}), kSys);
  CHECK(single == sum_rate(ch, Schedule::from_bits({1, 0}), kSys));
  CHECK(single > sum_rate(ch, Schedule::from_bits({1, 1}), kSys));
  CHECK(single > 0.0);

  // Tie-break: smallest big-endian value, i.e. [0,1] (=1) before [1,0] (=2).
  const LabeledSample out = exhaustive_search(ch, kSys);
  CHECK(out.optimal_schedule.gamma[0] == 0.0);
  CHECK(out.optimal_schedule.gamma[1] == 1.0);
  CHECK(out.optimal_sum_rate == single);
}

TEST_CASE("labeled sample is self-consistent") {
  const ChannelRealization ch = generate_sample(6, GeometryParams{}, PathLossParams{}, 777);
  const LabeledSample out = exhaustive_search(ch, kSys);
  const double recomputed = sum_rate(ch, out.optimal_schedule, kSys);
  CHECK(out.optimal_sum_rate == doctest::Approx(recomputed).epsilon(1e-9));
  CHECK(out.evaluated_schedules == 64);
  CHECK(out.label_wallclock_s >= 0.0);
}

TEST_CASE("oracle dominates random schedules") {
  Rng rng = Rng::derive(4242, {0});
  for (int s = 0; s < 1000; ++s) {
    const int k = 1 + static_cast<int>(rng.uniform_index(10));
    const ChannelRealization ch =
        generate_sample(k, GeometryParams{}, PathLossParams{}, 5000 + std::uint64_t(s));
    std::vector<std::uint8_t> bits(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) bits[static_cast<size_t>(i)] = rng.uniform() < 0.5 ? 0 : 1;
    const double random_rate = sum_rate(ch, Schedule::from_bits(bits), kSys);
    const LabeledSample out = exhaustive_search(ch, kSys);
    REQUIRE(out.optimal_sum_rate >= random_rate);
  }
}

TEST_CASE("rates are invariant to a common gain/noise scaling") {
  const ChannelRealization ch = generate_sample(5, GeometryParams{}, PathLossParams{}, 31);
  const Eigen::VectorXd base = link_rates(ch, Schedule::all_on(5), kSys);

  const double c = 100.0;
  ChannelRealization scaled = ch;
  scaled.gain_sq *= c;
  SystemParams sys2 = kSys;
  sys2.noise_psd_dbm_hz += 10.0 * std::log10(c);  // scales N, hence N/P_max, by c
  const Eigen::VectorXd after = link_rates(scaled, Schedule::all_on(5), sys2);
  for (int i = 0; i < 5; ++i) {
    CHECK(after[i] == doctest::Approx(base[i]).epsilon(1e-9));
  }
}

TEST_CASE("raising an interference gain never raises the victim rate") {
  Rng rng = Rng::derive(66, {6});
  for (int s = 0; s < 100; ++s) {
    ChannelRealization ch =
        generate_sample(4, GeometryParams{}, PathLossParams{}, 9000 + std::uint64_t(s));
    const int i = static_cast<int>(rng.uniform_index(4));
    int j = static_cast<int>(rng.uniform_index(4));
    if (j == i) j = (j + 1) % 4;
    const double before = link_rates(ch, Schedule::all_on(4), kSys)[i];
    ch.gain_sq(i, j) *= rng.uniform(1.5, 100.0);
    const double after = link_rates(ch, Schedule::all_on(4), kSys)[i];
    REQUIRE(after <= before);
  }
}

TEST_CASE("exhaustive search refuses oversized instances") {
  const ChannelRealization ch = generate_sample(5, GeometryParams{}, PathLossParams{}, 1);
  CHECK_THROWS_AS(exhaustive_search(ch, kSys, 4), DataError);
}

TEST_CASE("benchmark reports exact enumeration counts") {
  const std::vector<BenchRow> rows =
      label_timing_benchmark({4, 6}, 3, kSys, GeometryParams{}, PathLossParams{}, 99);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].evals == 16);
  CHECK(rows[1].evals == 64);
  CHECK(rows[0].t_unlabeled_s > 0.0);
  CHECK(rows[0].t_labeled_s > 0.0);
  CHECK(rows[1].t_labeled_s > rows[1].t_unlabeled_s);
}
