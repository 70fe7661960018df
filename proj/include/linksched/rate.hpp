#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "linksched/channel.hpp"

namespace linksched {

/// Per-link normalized transmit powers. Binary mode restricts entries to
/// {0,1}; relaxed mode allows [0,1] and is what the losses evaluate.
struct Schedule {
  Eigen::VectorXd gamma;
  bool binary = true;

  static Schedule all_on(int k) { return {Eigen::VectorXd::Ones(k), true}; }
  static Schedule all_off(int k) { return {Eigen::VectorXd::Zero(k), true}; }
  static Schedule from_bits(const std::vector<std::uint8_t>& bits) {
    Schedule s;
    s.gamma.resize(static_cast<int>(bits.size()));
    for (int i = 0; i < s.gamma.size(); ++i) s.gamma[i] = bits[static_cast<size_t>(i)] ? 1.0 : 0.0;
    s.binary = true;
    return s;
  }
  static Schedule relaxed(Eigen::VectorXd psi) { return {std::move(psi), false}; }

  std::vector<std::uint8_t> bits() const {
    std::vector<std::uint8_t> b(static_cast<size_t>(gamma.size()));
    for (int i = 0; i < gamma.size(); ++i) b[static_cast<size_t>(i)] = gamma[i] >= 0.5 ? 1 : 0;
    return b;
  }
};

/// Channel with its exhaustive-search optimum.
struct LabeledSample {
  ChannelRealization channel;
  Schedule optimal_schedule;
  double optimal_sum_rate = 0.0;
  double label_wallclock_s = 0.0;
  std::uint64_t evaluated_schedules = 0;
};

/// Shannon rates of all K links under the given (possibly relaxed) schedule,
/// in bits/s/Hz.
Eigen::VectorXd link_rates(const ChannelRealization& ch, const Schedule& gamma,
                           const SystemParams& sys);

double sum_rate(const ChannelRealization& ch, const Schedule& gamma, const SystemParams& sys);

/// Enumerates all 2^K binary schedules in plain counting order and returns a
/// maximizer. Ties go to the smallest schedule read as a big-endian integer
/// (gamma_1 most significant). Refuses K above `k_max` to keep runtimes sane.
LabeledSample exhaustive_search(const ChannelRealization& ch, const SystemParams& sys,
                                int k_max = 20);

struct BenchRow {
  int k = 0;
  double t_unlabeled_s = 0.0;
  double t_labeled_s = 0.0;
  std::uint64_t evals = 0;
};

/// Mean wall-clock per K to produce an unlabeled sample (deployment + channel)
/// and a labeled one (same plus exhaustive search).
std::vector<BenchRow> label_timing_benchmark(const std::vector<int>& k_values, int n_samples,
                                             const SystemParams& sys, const GeometryParams& geom,
                                             const PathLossParams& pl, std::uint64_t seed,
                                             int k_max = 20);

}  // namespace linksched
