#include "linksched/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "linksched/errors.hpp"
#include "linksched/textio.hpp"

namespace linksched {

namespace {

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  for (const std::string& part : split(value, ',')) {
    const std::string t = trim(part);
    if (t.empty()) throw ParseError("empty list element");
    out.push_back(static_cast<int>(parse_int(t)));
  }
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const std::string& part : split(value, ',')) {
    const std::string t = trim(part);
    if (t.empty()) throw ParseError("empty list element");
    out.push_back(parse_u64(t));
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

std::string join_u64s(const std::vector<std::uint64_t>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

// Canonical `key=value` lines shared by the two digests.
void append_data_lines(const ExperimentConfig& c, std::ostringstream& os) {
  os << "system.p_max_dbm=" << fmt17(c.sys.p_max_dbm) << "\n";
  os << "system.bandwidth_hz=" << fmt17(c.sys.bandwidth_hz) << "\n";
  os << "system.noise_psd_dbm_hz=" << fmt17(c.sys.noise_psd_dbm_hz) << "\n";
  os << "geometry.area_side_m=" << fmt17(c.geom.area_side_m) << "\n";
  os << "geometry.min_tx_sep_m=" << fmt17(c.geom.min_tx_sep_m) << "\n";
  os << "geometry.ring_inner_m=" << fmt17(c.geom.ring_inner_m) << "\n";
  os << "geometry.ring_outer_m=" << fmt17(c.geom.ring_outer_m) << "\n";
  os << "geometry.max_attempts=" << c.geom.max_attempts << "\n";
  os << "geometry.max_restarts=" << c.geom.max_restarts << "\n";
  os << "pathloss.ref_loss_db=" << fmt17(c.pl.ref_loss_db) << "\n";
  os << "pathloss.exp_near=" << fmt17(c.pl.exp_near) << "\n";
  os << "pathloss.exp_far=" << fmt17(c.pl.exp_far) << "\n";
  os << "pathloss.breakpoint_m=" << fmt17(c.pl.breakpoint_m) << "\n";
  os << "pathloss.shadowing_std_db=" << fmt17(c.pl.shadowing_std_db) << "\n";
  os << "run.master_seed=" << c.master_seed << "\n";
}

}  // namespace

std::vector<int> ExperimentConfig::dims() const {
  std::vector<int> d;
  d.reserve(hidden_dims.size() + 1);
  d.push_back(1);
  d.insert(d.end(), hidden_dims.begin(), hidden_dims.end());
  return d;
}

std::string ExperimentConfig::data_digest(int k, const std::string& split, int n) const {
  std::ostringstream os;
  append_data_lines(*this, os);
  os << "dataset.k=" << k << "\n";
  os << "dataset.split=" << split << "\n";
  os << "dataset.n=" << n << "\n";
  return to_hex(fnv1a64(os.str()));
}

std::string ExperimentConfig::full_digest() const {
  std::ostringstream os;
  append_data_lines(*this, os);
  os << "oracle.k_max_exhaustive=" << k_max_exhaustive << "\n";
  os << "gnn.hidden_dims=" << join_ints(hidden_dims) << "\n";
  os << "gnn.leaky_slope=" << fmt17(leaky_slope) << "\n";
  os << "train.regime=" << regime_name(regime.kind) << "\n";
  os << "train.epochs=" << regime.epochs << "\n";
  os << "train.ssl_epochs=" << regime.ssl_epochs << "\n";
  os << "train.tau=" << fmt17(regime.tau) << "\n";
  os << "train.lr=" << fmt17(regime.lr) << "\n";
  os << "train.batch_size=" << regime.batch_size << "\n";
  os << "train.perturb_min=" << fmt17(regime.aug.perturb_min) << "\n";
  os << "train.perturb_max=" << fmt17(regime.aug.perturb_max) << "\n";
  os << "train.prune_enabled=" << (regime.aug.prune_enabled ? "true" : "false") << "\n";
  os << "train.prune_quantile=" << fmt17(regime.aug.prune_quantile) << "\n";
  os << "run.k_list=" << join_ints(k_list) << "\n";
  os << "run.n_train=" << n_train << "\n";
  os << "run.n_test=" << n_test << "\n";
  os << "run.train_seeds=" << join_u64s(train_seeds) << "\n";
  os << "bench.k_values=" << join_ints(bench_k) << "\n";
  os << "bench.n_samples=" << bench_samples << "\n";
  os << "eval.convergence_threshold=" << fmt17(convergence_threshold) << "\n";
  os << "eval.sample_sizes=" << join_ints(sample_sizes) << "\n";
  os << "eval.k_train_list=" << join_ints(k_train_list) << "\n";
  return to_hex(fnv1a64(os.str()));
}

void apply_config_kv(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
  // NOLINTNEXTLINE: function-local static keeps the table built once.
  static const std::map<std::string, Setter> setters = {
      {"system.p_max_dbm", [](auto& c, const auto& v) { c.sys.p_max_dbm = parse_double(v); }},
      {"system.bandwidth_hz", [](auto& c, const auto& v) { c.sys.bandwidth_hz = parse_double(v); }},
      {"system.noise_psd_dbm_hz",
       [](auto& c, const auto& v) { c.sys.noise_psd_dbm_hz = parse_double(v); }},
      {"system.carrier_note", [](auto& c, const auto& v) { c.sys.carrier_note = v; }},
      {"geometry.area_side_m", [](auto& c, const auto& v) { c.geom.area_side_m = parse_double(v); }},
      {"geometry.min_tx_sep_m",
       [](auto& c, const auto& v) { c.geom.min_tx_sep_m = parse_double(v); }},
      {"geometry.ring_inner_m",
       [](auto& c, const auto& v) { c.geom.ring_inner_m = parse_double(v); }},
      {"geometry.ring_outer_m",
       [](auto& c, const auto& v) { c.geom.ring_outer_m = parse_double(v); }},
      {"geometry.max_attempts",
       [](auto& c, const auto& v) { c.geom.max_attempts = static_cast<int>(parse_int(v)); }},
      {"geometry.max_restarts",
       [](auto& c, const auto& v) { c.geom.max_restarts = static_cast<int>(parse_int(v)); }},
      {"pathloss.ref_loss_db", [](auto& c, const auto& v) { c.pl.ref_loss_db = parse_double(v); }},
      {"pathloss.exp_near", [](auto& c, const auto& v) { c.pl.exp_near = parse_double(v); }},
      {"pathloss.exp_far", [](auto& c, const auto& v) { c.pl.exp_far = parse_double(v); }},
      {"pathloss.breakpoint_m",
       [](auto& c, const auto& v) { c.pl.breakpoint_m = parse_double(v); }},
      {"pathloss.shadowing_std_db",
       [](auto& c, const auto& v) { c.pl.shadowing_std_db = parse_double(v); }},
      {"oracle.k_max_exhaustive",
       [](auto& c, const auto& v) { c.k_max_exhaustive = static_cast<int>(parse_int(v)); }},
      {"gnn.hidden_dims", [](auto& c, const auto& v) { c.hidden_dims = parse_int_list(v); }},
      {"gnn.leaky_slope", [](auto& c, const auto& v) { c.leaky_slope = parse_double(v); }},
      {"train.regime", [](auto& c, const auto& v) { c.regime.kind = parse_regime(v); }},
      {"train.epochs",
       [](auto& c, const auto& v) { c.regime.epochs = static_cast<int>(parse_int(v)); }},
      {"train.ssl_epochs",
       [](auto& c, const auto& v) { c.regime.ssl_epochs = static_cast<int>(parse_int(v)); }},
      {"train.tau", [](auto& c, const auto& v) { c.regime.tau = parse_double(v); }},
      {"train.lr", [](auto& c, const auto& v) { c.regime.lr = parse_double(v); }},
      {"train.batch_size",
       [](auto& c, const auto& v) { c.regime.batch_size = static_cast<int>(parse_int(v)); }},
      {"train.perturb_min",
       [](auto& c, const auto& v) { c.regime.aug.perturb_min = parse_double(v); }},
      {"train.perturb_max",
       [](auto& c, const auto& v) { c.regime.aug.perturb_max = parse_double(v); }},
      {"train.prune_enabled",
       [](auto& c, const auto& v) { c.regime.aug.prune_enabled = parse_bool(v); }},
      {"train.prune_quantile",
       [](auto& c, const auto& v) { c.regime.aug.prune_quantile = parse_double(v); }},
      {"run.k_list", [](auto& c, const auto& v) { c.k_list = parse_int_list(v); }},
      {"run.n_train", [](auto& c, const auto& v) { c.n_train = static_cast<int>(parse_int(v)); }},
      {"run.n_test", [](auto& c, const auto& v) { c.n_test = static_cast<int>(parse_int(v)); }},
      {"run.master_seed", [](auto& c, const auto& v) { c.master_seed = parse_u64(v); }},
      {"run.train_seeds", [](auto& c, const auto& v) { c.train_seeds = parse_u64_list(v); }},
      {"run.out_dir", [](auto& c, const auto& v) { c.out_dir = v; }},
      {"run.threads", [](auto& c, const auto& v) { c.threads = static_cast<int>(parse_int(v)); }},
      {"run.quiet", [](auto& c, const auto& v) { c.quiet = parse_bool(v); }},
      {"bench.k_values", [](auto& c, const auto& v) { c.bench_k = parse_int_list(v); }},
      {"bench.n_samples",
       [](auto& c, const auto& v) { c.bench_samples = static_cast<int>(parse_int(v)); }},
      {"eval.convergence_threshold",
       [](auto& c, const auto& v) { c.convergence_threshold = parse_double(v); }},
      {"eval.sample_sizes", [](auto& c, const auto& v) { c.sample_sizes = parse_int_list(v); }},
      {"eval.k_train_list", [](auto& c, const auto& v) { c.k_train_list = parse_int_list(v); }},
  };

  const auto it = setters.find(key);
  if (it == setters.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    it->second(cfg, value);
  } catch (const ParseError& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  if (path.empty()) {
    validate_config(cfg);
    return cfg;
  }
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      apply_config_kv(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };

  if (!(cfg.sys.bandwidth_hz > 0.0)) fail("system.bandwidth_hz must be positive");
  if (!(cfg.sys.noise_over_pmax() > 0.0)) fail("derived noise/P_max must be positive");
  if (!(cfg.geom.area_side_m > 0.0)) fail("geometry.area_side_m must be positive");
  if (!(cfg.geom.min_tx_sep_m >= 0.0)) fail("geometry.min_tx_sep_m must be non-negative");
  if (!(cfg.geom.ring_inner_m < cfg.geom.ring_outer_m)) {
    fail("geometry ring_inner_m must be below ring_outer_m");
  }
  if (cfg.geom.max_attempts < 1 || cfg.geom.max_restarts < 1) {
    fail("geometry attempt limits must be at least 1");
  }
  if (!(cfg.pl.exp_near > 0.0) || !(cfg.pl.exp_far >= cfg.pl.exp_near)) {
    fail("pathloss exponents must satisfy exp_far >= exp_near > 0");
  }
  if (!(cfg.pl.breakpoint_m > 0.0)) fail("pathloss.breakpoint_m must be positive");
  if (!(cfg.pl.shadowing_std_db >= 0.0)) fail("pathloss.shadowing_std_db must be non-negative");
  if (cfg.k_max_exhaustive < 1 || cfg.k_max_exhaustive > 30) {
    fail("oracle.k_max_exhaustive must be in [1, 30]");
  }
  if (cfg.hidden_dims.empty()) fail("gnn.hidden_dims must be non-empty");
  for (int d : cfg.hidden_dims) {
    if (d < 1) fail("gnn.hidden_dims entries must be positive");
  }
  if (!(cfg.leaky_slope >= 0.0)) fail("gnn.leaky_slope must be non-negative");
  if (cfg.regime.epochs < 0 || cfg.regime.ssl_epochs < 0) fail("epoch counts must be >= 0");
  if (!(cfg.regime.tau > 0.0)) fail("train.tau must be positive");
  if (!(cfg.regime.lr > 0.0)) fail("train.lr must be positive");
  if (cfg.regime.batch_size < 1) fail("train.batch_size must be >= 1");
  if (!(cfg.regime.aug.perturb_min > 0.0) ||
      !(cfg.regime.aug.perturb_min <= cfg.regime.aug.perturb_max)) {
    fail("train perturbation interval must satisfy 0 < min <= max");
  }
  if (!(cfg.regime.aug.prune_quantile >= 0.0) || !(cfg.regime.aug.prune_quantile < 1.0)) {
    fail("train.prune_quantile must be in [0, 1)");
  }
  if (cfg.k_list.empty()) fail("run.k_list must be non-empty");
  for (int k : cfg.k_list) {
    if (k < 1) fail("run.k_list entries must be >= 1");
  }
  if (cfg.n_train < 1 || cfg.n_test < 1) fail("dataset sizes must be >= 1");
  if (cfg.train_seeds.empty()) fail("run.train_seeds must be non-empty");
  if (cfg.threads < 1) fail("run.threads must be >= 1");
  if (cfg.bench_samples < 1) fail("bench.n_samples must be >= 1");
  for (int k : cfg.bench_k) {
    if (k < 1) fail("bench.k_values entries must be >= 1");
  }
  if (!(cfg.convergence_threshold > 0.0)) fail("eval.convergence_threshold must be positive");
  for (int s : cfg.sample_sizes) {
    if (s < 1) fail("eval.sample_sizes entries must be >= 1");
  }
}

}  // namespace linksched
