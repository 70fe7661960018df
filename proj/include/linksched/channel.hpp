#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "linksched/rng.hpp"

namespace linksched {

/// Transmit-power / noise constants of the system under study.
struct SystemParams {
  double p_max_dbm = 10.0;
  double bandwidth_hz = 10e6;
  double noise_psd_dbm_hz = -174.0;
  std::string carrier_note = "path loss referenced to 1 m";

  double noise_power_dbm() const {
    return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
  }
  double noise_linear_mw() const { return std::pow(10.0, noise_power_dbm() / 10.0); }
  double p_max_linear_mw() const { return std::pow(10.0, p_max_dbm / 10.0); }
  /// N / P_max, the noise term of the per-link SINR.
  double noise_over_pmax() const { return noise_linear_mw() / p_max_linear_mw(); }
};

struct GeometryParams {
  double area_side_m = 250.0;
  double min_tx_sep_m = 35.0;
  double ring_inner_m = 10.0;
  double ring_outer_m = 50.0;
  int max_attempts = 10000;  // rejection draws per point
  int max_restarts = 100;    // full deployment restarts
};

struct PathLossParams {
  double ref_loss_db = 40.0;  // at 1 m
  double exp_near = 2.0;
  double exp_far = 4.0;
  double breakpoint_m = 50.0;
  double shadowing_std_db = 7.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Positions of the K transmitter-receiver pairs inside the square area.
struct Deployment {
  double area_side_m = 0.0;
  std::vector<Point> tx;
  std::vector<Point> rx;

  int k() const { return static_cast<int>(tx.size()); }
};

/// One random network draw: geometry plus the K x K matrix of channel gain
/// magnitudes-squared |h_ij|^2 (linear). Row i is receiver Rx_i, column j is
/// transmitter Tx_j.
struct ChannelRealization {
  Deployment deployment;
  Eigen::MatrixXd gain_sq;
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(gain_sq.rows()); }
};

/// Dual-slope path loss in dB; continuous at the breakpoint.
double path_loss_db(double distance_m, const PathLossParams& pl);

/// Draws K transmitters uniformly in the square subject to the minimum
/// pairwise separation, then one receiver per transmitter uniformly over the
/// annulus area (rejected until inside the square).
Deployment deploy_network(int k, const GeometryParams& geom, Rng rng);

/// Log-normal shadowed gains over the dual-slope path loss. Shadowing draws
/// are consumed row-major (receiver-major), one per (i, j) entry.
ChannelRealization sample_channel(const Deployment& dep, const PathLossParams& pl, Rng rng);

/// Deployment + channel for sample `seed`, with the deploy/channel streams
/// derived from it. This is the per-record generation path of the dataset
/// pipeline.
ChannelRealization generate_sample(int k, const GeometryParams& geom, const PathLossParams& pl,
                                   std::uint64_t seed);

}  // namespace linksched
