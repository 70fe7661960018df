#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linksched/channel.hpp"

namespace linksched {

struct DatasetLabel {
  std::vector<std::uint8_t> bits;  // optimal binary schedule
  double opt_sum_rate = 0.0;
  double wallclock_s = 0.0;
};

struct DatasetRecord {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  ChannelRealization channel;
  std::optional<DatasetLabel> label;
};

/// Line-delimited dataset file: one versioned, self-describing header line,
/// then one record line per sample. Doubles carry 17 significant digits so
/// write -> read -> write reproduces identical bytes.
struct Dataset {
  std::string digest;  // data digest of the producing config
  int k = 0;
  std::string split;
  SystemParams sys;
  GeometryParams geom;
  PathLossParams pl;
  std::vector<DatasetRecord> records;

  int n_labeled() const;
};

void write_dataset(const std::string& path, const Dataset& ds);

/// Parses and revalidates: structural consistency, positive finite gains,
/// and for labeled records that the stored optimum equals the recomputed
/// sum-rate to 1e-9 relative. Throws DataError on any violation.
Dataset read_dataset(const std::string& path);

/// Geometry/invariant checks beyond what read_dataset enforces. With `deep`,
/// re-runs the exhaustive search per labeled record and requires identical
/// schedules.
void validate_dataset(const Dataset& ds, bool deep, int k_max);

}  // namespace linksched
