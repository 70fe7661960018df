#include "linksched/channel.hpp"

#include <cmath>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

namespace {

constexpr double kLn10Over10 = 0.23025850929940456840;  // ln(10)/10

bool inside_square(const Point& p, double side) {
  return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side;
}

}  // namespace

double path_loss_db(double distance_m, const PathLossParams& pl) {
  if (!(distance_m > 0.0)) {
    throw DomainError("path_loss_db: distance must be positive, got " +
                      std::to_string(distance_m));
  }
  if (distance_m <= pl.breakpoint_m) {
    return pl.ref_loss_db + 10.0 * pl.exp_near * std::log10(distance_m);
  }
  return pl.ref_loss_db + 10.0 * pl.exp_near * std::log10(pl.breakpoint_m) +
         10.0 * pl.exp_far * std::log10(distance_m / pl.breakpoint_m);
}

Deployment deploy_network(int k, const GeometryParams& geom, Rng rng) {
  if (k < 1) {
    throw DomainError("deploy_network: k must be >= 1");
  }
  if (!(geom.ring_inner_m < geom.ring_outer_m)) {
    throw DomainError("deploy_network: ring_inner must be < ring_outer");
  }

  const double side = geom.area_side_m;
  const double sep2 = geom.min_tx_sep_m * geom.min_tx_sep_m;
  const double r_in2 = geom.ring_inner_m * geom.ring_inner_m;
  const double r_out2 = geom.ring_outer_m * geom.ring_outer_m;

  Deployment dep;
  dep.area_side_m = side;
  dep.tx.reserve(k);
  dep.rx.reserve(k);

  for (int restart = 0; restart < geom.max_restarts; ++restart) {
    dep.tx.clear();
    dep.rx.clear();
    bool failed = false;

    // Transmitters: sequential rejection against all previously placed ones.
    for (int i = 0; i < k && !failed; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < geom.max_attempts; ++attempt) {
        Point cand{rng.uniform(0.0, side), rng.uniform(0.0, side)};
        bool ok = true;
        for (const Point& prev : dep.tx) {
          const double dx = cand.x - prev.x;
          const double dy = cand.y - prev.y;
          if (dx * dx + dy * dy < sep2) {
            ok = false;
            break;
          }
        }
        if (ok) {
          dep.tx.push_back(cand);
          placed = true;
          break;
        }
      }
      failed = !placed;
    }

    // Receivers: uniform over the annulus area around the paired transmitter,
    // redrawn until inside the square.
    for (int i = 0; i < k && !failed; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < geom.max_attempts; ++attempt) {
        const double r = std::sqrt(rng.uniform(r_in2, r_out2));
        const double a = rng.uniform(0.0, 6.283185307179586476925286766559);
        Point cand{dep.tx[i].x + r * std::cos(a), dep.tx[i].y + r * std::sin(a)};
        if (inside_square(cand, side)) {
          dep.rx.push_back(cand);
          placed = true;
          break;
        }
      }
      failed = !placed;
    }

    if (!failed) {
      return dep;
    }
  }

  throw DataError("deploy_network: could not place k=" + std::to_string(k) +
                  " transmitters with min separation " + std::to_string(geom.min_tx_sep_m) +
                  " m in a " + std::to_string(geom.area_side_m) + " m square after " +
                  std::to_string(geom.max_restarts) + " restarts");
}

ChannelRealization sample_channel(const Deployment& dep, const PathLossParams& pl, Rng rng) {
  const int k = dep.k();
  ChannelRealization ch;
  ch.deployment = dep;
  ch.gain_sq.resize(k, k);

  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double d = distance(dep.tx[j], dep.rx[i]);
      const double loss_db = path_loss_db(d, pl) + rng.normal(0.0, pl.shadowing_std_db);
      ch.gain_sq(i, j) = std::exp(-loss_db * kLn10Over10);
    }
  }
  return ch;
}

ChannelRealization generate_sample(int k, const GeometryParams& geom, const PathLossParams& pl,
                                   std::uint64_t seed) {
  Deployment dep = deploy_network(k, geom, Rng::derive(seed, {stream::kDeploy}));
  ChannelRealization ch = sample_channel(dep, pl, Rng::derive(seed, {stream::kChannel}));
  ch.seed = seed;
  return ch;
}

}  // namespace linksched
