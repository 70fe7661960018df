#include "linksched/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "linksched/errors.hpp"
#include "linksched/rate.hpp"
#include "linksched/textio.hpp"

namespace linksched {

namespace {

std::string points_to_str(const std::vector<Point>& pts) {
  std::ostringstream os;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) os << "|";
    os << fmt17(pts[i].x) << ":" << fmt17(pts[i].y);
  }
  return os.str();
}

std::vector<Point> points_from_str(const std::string& s) {
  std::vector<Point> pts;
  for (const std::string& pair : split(s, '|')) {
    const auto xy = split(pair, ':');
    if (xy.size() != 2) throw ParseError("bad point '" + pair + "'");
    pts.push_back({parse_double(xy[0]), parse_double(xy[1])});
  }
  return pts;
}

// Tokenizes "key=value key=value ..." preserving order.
std::vector<std::pair<std::string, std::string>> kv_tokens(const std::string& line,
                                                           size_t start_pos) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(line.substr(start_pos));
  std::string tok;
  while (is >> tok) {
    const size_t eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value, got '" + tok + "'");
    out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

constexpr char kHeaderTag[] = "linksched-dataset v1";

}  // namespace

int Dataset::n_labeled() const {
  int n = 0;
  for (const DatasetRecord& r : records) {
    if (r.label) ++n;
  }
  return n;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("write_dataset: cannot open '" + path + "'");
  }
  out << kHeaderTag << " digest=" << ds.digest << " k=" << ds.k << " split=" << ds.split
      << " n=" << ds.records.size() << " p_max_dbm=" << fmt17(ds.sys.p_max_dbm)
      << " bandwidth_hz=" << fmt17(ds.sys.bandwidth_hz)
      << " noise_psd_dbm_hz=" << fmt17(ds.sys.noise_psd_dbm_hz)
      << " area_side_m=" << fmt17(ds.geom.area_side_m)
      << " min_tx_sep_m=" << fmt17(ds.geom.min_tx_sep_m)
      << " ring_inner_m=" << fmt17(ds.geom.ring_inner_m)
      << " ring_outer_m=" << fmt17(ds.geom.ring_outer_m)
      << " max_attempts=" << ds.geom.max_attempts << " max_restarts=" << ds.geom.max_restarts
      << " ref_loss_db=" << fmt17(ds.pl.ref_loss_db) << " exp_near=" << fmt17(ds.pl.exp_near)
      << " exp_far=" << fmt17(ds.pl.exp_far) << " breakpoint_m=" << fmt17(ds.pl.breakpoint_m)
      << " shadowing_std_db=" << fmt17(ds.pl.shadowing_std_db) << "\n";

  for (const DatasetRecord& r : ds.records) {
    out << "rec id=" << r.id << " seed=" << r.seed
        << " tx=" << points_to_str(r.channel.deployment.tx)
        << " rx=" << points_to_str(r.channel.deployment.rx) << " g=";
    const Eigen::MatrixXd& g = r.channel.gain_sq;
    for (int i = 0; i < g.rows(); ++i) {
      for (int j = 0; j < g.cols(); ++j) {
        if (i || j) out << ",";
        out << fmt17(g(i, j));
      }
    }
    if (r.label) {
      out << " label=";
      for (std::uint8_t b : r.label->bits) out << (b ? '1' : '0');
      out << " opt_rate=" << fmt17(r.label->opt_sum_rate)
          << " label_s=" << fmt17(r.label->wallclock_s);
    }
    out << "\n";
  }
  if (!out) {
    throw DataError("write_dataset: write failed for '" + path + "'");
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("read_dataset: cannot open '" + path + "'");
  }

  Dataset ds;
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHeaderTag, 0) != 0) {
    throw DataError("read_dataset: '" + path + "' is not a linksched-dataset v1 file");
  }

  size_t declared_n = 0;
  try {
    for (const auto& [key, value] : kv_tokens(line, sizeof(kHeaderTag) - 1)) {
      if (key == "digest") ds.digest = value;
      else if (key == "k") ds.k = static_cast<int>(parse_int(value));
      else if (key == "split") ds.split = value;
      else if (key == "n") declared_n = static_cast<size_t>(parse_int(value));
      else if (key == "p_max_dbm") ds.sys.p_max_dbm = parse_double(value);
      else if (key == "bandwidth_hz") ds.sys.bandwidth_hz = parse_double(value);
      else if (key == "noise_psd_dbm_hz") ds.sys.noise_psd_dbm_hz = parse_double(value);
      else if (key == "area_side_m") ds.geom.area_side_m = parse_double(value);
      else if (key == "min_tx_sep_m") ds.geom.min_tx_sep_m = parse_double(value);
      else if (key == "ring_inner_m") ds.geom.ring_inner_m = parse_double(value);
      else if (key == "ring_outer_m") ds.geom.ring_outer_m = parse_double(value);
      else if (key == "max_attempts") ds.geom.max_attempts = static_cast<int>(parse_int(value));
      else if (key == "max_restarts") ds.geom.max_restarts = static_cast<int>(parse_int(value));
      else if (key == "ref_loss_db") ds.pl.ref_loss_db = parse_double(value);
      else if (key == "exp_near") ds.pl.exp_near = parse_double(value);
      else if (key == "exp_far") ds.pl.exp_far = parse_double(value);
      else if (key == "breakpoint_m") ds.pl.breakpoint_m = parse_double(value);
      else if (key == "shadowing_std_db") ds.pl.shadowing_std_db = parse_double(value);
      else throw ParseError("unknown header field '" + key + "'");
    }
  } catch (const ParseError& e) {
    throw DataError("read_dataset: bad header in '" + path + "': " + e.what());
  }
  if (ds.k < 1) {
    throw DataError("read_dataset: header of '" + path + "' lacks a valid k");
  }

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (line.rfind("rec ", 0) != 0) {
      throw DataError("read_dataset: " + path + ":" + std::to_string(lineno) +
                      ": expected record line");
    }
    DatasetRecord rec;
    rec.channel.deployment.area_side_m = ds.geom.area_side_m;
    std::string label_bits;
    bool has_opt_rate = false, has_label_s = false;
    DatasetLabel label;
    try {
      for (const auto& [key, value] : kv_tokens(line, 4)) {
        if (key == "id") rec.id = parse_u64(value);
        else if (key == "seed") rec.seed = parse_u64(value);
        else if (key == "tx") rec.channel.deployment.tx = points_from_str(value);
        else if (key == "rx") rec.channel.deployment.rx = points_from_str(value);
        else if (key == "g") {
          const auto parts = split(value, ',');
          if (static_cast<int>(parts.size()) != ds.k * ds.k) {
            throw ParseError("gain matrix has " + std::to_string(parts.size()) +
                             " entries, expected " + std::to_string(ds.k * ds.k));
          }
          rec.channel.gain_sq.resize(ds.k, ds.k);
          int idx = 0;
          for (int i = 0; i < ds.k; ++i) {
            for (int j = 0; j < ds.k; ++j) {
              rec.channel.gain_sq(i, j) = parse_double(parts[static_cast<size_t>(idx++)]);
            }
          }
        } else if (key == "label") {
          label_bits = value;
        } else if (key == "opt_rate") {
          label.opt_sum_rate = parse_double(value);
          has_opt_rate = true;
        } else if (key == "label_s") {
          label.wallclock_s = parse_double(value);
          has_label_s = true;
        } else {
          throw ParseError("unknown record field '" + key + "'");
        }
      }
    } catch (const ParseError& e) {
      throw DataError("read_dataset: " + path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    rec.channel.seed = rec.seed;

    const std::string where = path + ":" + std::to_string(lineno);
    if (static_cast<int>(rec.channel.deployment.tx.size()) != ds.k ||
        static_cast<int>(rec.channel.deployment.rx.size()) != ds.k ||
        rec.channel.gain_sq.rows() != ds.k) {
      throw DataError("read_dataset: " + where + ": record does not match k=" +
                      std::to_string(ds.k));
    }
    for (int i = 0; i < ds.k; ++i) {
      for (int j = 0; j < ds.k; ++j) {
        const double g = rec.channel.gain_sq(i, j);
        if (!(g > 0.0) || !std::isfinite(g)) {
          throw DataError("read_dataset: " + where + ": non-positive or non-finite gain");
        }
      }
    }

    if (!label_bits.empty() || has_opt_rate || has_label_s) {
      if (label_bits.size() != static_cast<size_t>(ds.k) || !has_opt_rate || !has_label_s) {
        throw DataError("read_dataset: " + where + ": incomplete label fields");
      }
      label.bits.resize(static_cast<size_t>(ds.k));
      for (int i = 0; i < ds.k; ++i) {
        const char c = label_bits[static_cast<size_t>(i)];
        if (c != '0' && c != '1') {
          throw DataError("read_dataset: " + where + ": label must be a 0/1 string");
        }
        label.bits[static_cast<size_t>(i)] = (c == '1') ? 1 : 0;
      }
      // Revalidate the stored optimum against the recomputed sum-rate.
      const double recomputed = sum_rate(rec.channel, Schedule::from_bits(label.bits), ds.sys);
      const double tol = 1e-9 * std::max(1.0, std::abs(label.opt_sum_rate));
      if (std::abs(recomputed - label.opt_sum_rate) > tol) {
        throw DataError("read_dataset: " + where + ": stored optimal sum-rate " +
                        fmt17(label.opt_sum_rate) + " != recomputed " + fmt17(recomputed));
      }
      rec.label = std::move(label);
    }
    ds.records.push_back(std::move(rec));
  }

  if (ds.records.size() != declared_n) {
    throw DataError("read_dataset: '" + path + "' declares n=" + std::to_string(declared_n) +
                    " but holds " + std::to_string(ds.records.size()) + " records");
  }
  return ds;
}

void validate_dataset(const Dataset& ds, bool deep, int k_max) {
  const double side = ds.geom.area_side_m;
  const double sep = ds.geom.min_tx_sep_m;
  // Loose epsilon for values that round-tripped through text.
  const double eps = 1e-9;

  for (const DatasetRecord& rec : ds.records) {
    const std::string where = "record " + std::to_string(rec.id);
    const Deployment& dep = rec.channel.deployment;
    for (const Point& p : dep.tx) {
      if (p.x < -eps || p.x > side + eps || p.y < -eps || p.y > side + eps) {
        throw DataError("validate: " + where + ": transmitter outside deployment area");
      }
    }
    for (const Point& p : dep.rx) {
      if (p.x < -eps || p.x > side + eps || p.y < -eps || p.y > side + eps) {
        throw DataError("validate: " + where + ": receiver outside deployment area");
      }
    }
    for (size_t i = 0; i < dep.tx.size(); ++i) {
      for (size_t j = i + 1; j < dep.tx.size(); ++j) {
        if (distance(dep.tx[i], dep.tx[j]) < sep - 1e-6) {
          throw DataError("validate: " + where + ": transmitter separation below minimum");
        }
      }
      const double d = distance(dep.tx[i], dep.rx[i]);
      if (d < ds.geom.ring_inner_m - 1e-6 || d > ds.geom.ring_outer_m + 1e-6) {
        throw DataError("validate: " + where + ": paired link distance outside the ring");
      }
    }
    if (deep && rec.label) {
      const LabeledSample fresh = exhaustive_search(rec.channel, ds.sys, k_max);
      if (fresh.optimal_schedule.bits() != rec.label->bits) {
        throw DataError("validate: " + where + ": stored label differs from re-enumeration");
      }
    }
  }
}

}  // namespace linksched
