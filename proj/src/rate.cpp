#include "linksched/rate.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "linksched/errors.hpp"
#include "linksched/rng.hpp"

namespace linksched {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Sum-rate of the schedule encoded by the low K bits of `mask`, with bit
/// (K-1-i) carrying gamma_i so that the mask value equals the schedule read
/// as a big-endian integer.
double masked_sum_rate(const Eigen::MatrixXd& g, std::uint64_t mask, int k, double noise) {
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    if (((mask >> (k - 1 - i)) & 1u) == 0) continue;
    double interference = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      if ((mask >> (k - 1 - j)) & 1u) interference += g(i, j);
    }
    total += std::log2(1.0 + g(i, i) / (interference + noise));
  }
  return total;
}

}  // namespace

Eigen::VectorXd link_rates(const ChannelRealization& ch, const Schedule& gamma,
                           const SystemParams& sys) {
  const int k = ch.k();
  if (gamma.gamma.size() != k) {
    throw DimensionError("link_rates: schedule length " + std::to_string(gamma.gamma.size()) +
                         " != K " + std::to_string(k));
  }
  const double noise = sys.noise_over_pmax();
  Eigen::VectorXd rates(k);
  for (int i = 0; i < k; ++i) {
    double interference = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j != i) interference += ch.gain_sq(i, j) * gamma.gamma[j];
    }
    rates[i] = std::log2(1.0 + ch.gain_sq(i, i) * gamma.gamma[i] / (interference + noise));
  }
  return rates;
}

double sum_rate(const ChannelRealization& ch, const Schedule& gamma, const SystemParams& sys) {
  return link_rates(ch, gamma, sys).sum();
}

LabeledSample exhaustive_search(const ChannelRealization& ch, const SystemParams& sys, int k_max) {
  const int k = ch.k();
  if (k > k_max) {
    throw DataError("exhaustive_search: K=" + std::to_string(k) + " exceeds cap " +
                    std::to_string(k_max) + " (2^K schedules would be evaluated)");
  }
  const auto t0 = Clock::now();
  const double noise = sys.noise_over_pmax();
  const std::uint64_t count = std::uint64_t{1} << k;

  std::uint64_t best_mask = 0;
  double best_rate = 0.0;  // mask 0 yields exactly 0
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    const double r = masked_sum_rate(ch.gain_sq, mask, k, noise);
    if (r > best_rate) {
      best_rate = r;
      best_mask = mask;
    }
  }

  LabeledSample out;
  out.channel = ch;
  out.optimal_schedule.gamma.resize(k);
  for (int i = 0; i < k; ++i) {
    out.optimal_schedule.gamma[i] = ((best_mask >> (k - 1 - i)) & 1u) ? 1.0 : 0.0;
  }
  out.optimal_schedule.binary = true;
  out.optimal_sum_rate = best_rate;
  out.evaluated_schedules = count;
  out.label_wallclock_s = seconds_since(t0);
  return out;
}

std::vector<BenchRow> label_timing_benchmark(const std::vector<int>& k_values, int n_samples,
                                             const SystemParams& sys, const GeometryParams& geom,
                                             const PathLossParams& pl, std::uint64_t seed,
                                             int k_max) {
  std::vector<BenchRow> rows;
  rows.reserve(k_values.size());
  for (int k : k_values) {
    if (k > k_max) {
      throw DataError("label_timing_benchmark: K=" + std::to_string(k) + " exceeds cap " +
                      std::to_string(k_max));
    }
    BenchRow row;
    row.k = k;
    row.evals = std::uint64_t{1} << k;

    // Warm-up draw so first-touch costs do not land in the timed region.
    (void)generate_sample(k, geom, pl, Rng::derive(seed, {stream::kBench, std::uint64_t(k)}).next_u64());

    std::vector<ChannelRealization> channels;
    channels.reserve(static_cast<size_t>(n_samples));
    const auto t_gen = Clock::now();
    for (int i = 0; i < n_samples; ++i) {
      const std::uint64_t s =
          Rng::derive(seed, {stream::kBench, std::uint64_t(k), std::uint64_t(i)}).next_u64();
      channels.push_back(generate_sample(k, geom, pl, s));
    }
    row.t_unlabeled_s = seconds_since(t_gen) / n_samples;

    const auto t_label = Clock::now();
    for (const ChannelRealization& ch : channels) {
      LabeledSample labeled = exhaustive_search(ch, sys, k_max);
      // Prevent the optimizer from dropping the search.
      if (!(labeled.optimal_sum_rate >= 0.0)) {
        throw NumericError("label_timing_benchmark: negative optimal sum-rate");
      }
    }
    // A labeled sample costs its generation plus its exhaustive search.
    row.t_labeled_s = row.t_unlabeled_s + seconds_since(t_label) / n_samples;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace linksched
