#include "linksched/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "linksched/errors.hpp"
#include "linksched/parallel.hpp"
#include "linksched/rate.hpp"
#include "linksched/textio.hpp"

namespace fs = std::filesystem;

namespace linksched {

namespace {

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_time6e(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw DataError("cannot create directory '" + dir + "': " + ec.message());
  }
}

// Writes through a temp file so readers never observe half-written artifacts.
void atomic_write(const std::string& path, const std::function<void(const std::string&)>& writer) {
  const std::string tmp = path + ".tmp";
  writer(tmp);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw DataError("cannot move '" + tmp + "' into place: " + ec.message());
  }
}

std::vector<TrainSample> load_samples(const ExperimentConfig& cfg, int k, const std::string& split,
                                      bool require_labels) {
  const std::string path = dataset_path(cfg, k, split);
  const Dataset ds = read_dataset(path);
  const std::string expected = cfg.data_digest(k, split, static_cast<int>(ds.records.size()));
  if (ds.digest != expected) {
    throw DataError("dataset '" + path + "' was produced by a different configuration (digest " +
                    ds.digest + ", expected " + expected + ")");
  }
  if (ds.k != k || ds.split != split) {
    throw DataError("dataset '" + path + "' header does not match requested k/split");
  }
  return samples_from_dataset(ds, require_labels);
}

void write_training_log(const std::string& path, const std::string& digest, int k,
                        const std::string& regime, std::uint64_t seed,
                        const std::vector<EpochRow>& log) {
  atomic_write(path, [&](const std::string& tmp) {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot open '" + tmp + "'");
    out << "# linksched digest=" << digest << " k=" << k << " regime=" << regime
        << " seed=" << seed << "\n";
    out << "epoch,train_loss,test_norm_sum_rate\n";
    for (const EpochRow& row : log) {
      out << row.epoch << "," << fmt12(row.train_loss) << "," << fmt12(row.test_metric) << "\n";
    }
    if (!out) throw DataError("write failed for '" + tmp + "'");
  });
}

struct LoggedRun {
  std::string digest;
  std::vector<double> metrics;  // per epoch
};

LoggedRun read_training_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open training log '" + path + "'");
  LoggedRun run;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# linksched digest=", 0) != 0) {
    throw DataError("'" + path + "' is not a training log");
  }
  {
    std::istringstream is(line.substr(2));
    std::string tok;
    while (is >> tok) {
      if (tok.rfind("digest=", 0) == 0) run.digest = tok.substr(7);
    }
  }
  if (!std::getline(in, line) || line != "epoch,train_loss,test_norm_sum_rate") {
    throw DataError("'" + path + "' has an unexpected header row");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3) throw DataError("'" + path + "' has a malformed row");
    try {
      run.metrics.push_back(parse_double(parts[2]));
    } catch (const ParseError& e) {
      throw DataError("'" + path + "': " + e.what());
    }
  }
  return run;
}

// ---- sweep cells -----------------------------------------------------------

struct CellKey {
  int k = 0;
  RegimeKind kind = RegimeKind::kSupervised;
  std::uint64_t seed = 0;
  int n_train = 0;
};

std::string cell_stem(const CellKey& key) {
  return "k" + std::to_string(key.k) + "_" + regime_name(key.kind) + "_s" +
         std::to_string(key.seed) + "_n" + std::to_string(key.n_train);
}

struct CellPaths {
  std::string log_csv;
  std::string best_ckpt;
  std::string final_ckpt;
};

CellPaths cell_paths(const ExperimentConfig& cfg, const CellKey& key) {
  const std::string base = cfg.out_dir + "/cells/" + cell_stem(key);
  return {base + ".csv", base + ".best.ckpt", base + ".final.ckpt"};
}

// Digest of the exact effective configuration a cell runs under.
std::string cell_digest(const ExperimentConfig& cfg, const CellKey& key) {
  ExperimentConfig eff = cfg;
  eff.regime.kind = key.kind;
  eff.n_train = key.n_train;
  return eff.full_digest();
}

struct CellResult {
  std::vector<double> metrics;
  std::string best_ckpt;
};

class SampleCache {
 public:
  explicit SampleCache(const ExperimentConfig& cfg) : cfg_(cfg) {}

  const std::vector<TrainSample>& get(int k, const std::string& split, bool require_labels) {
    const auto key = std::make_pair(k, split);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, load_samples(cfg_, k, split, require_labels)).first;
    }
    return it->second;
  }

 private:
  const ExperimentConfig& cfg_;
  std::map<std::pair<int, std::string>, std::vector<TrainSample>> cache_;
};

bool cell_complete(const ExperimentConfig& cfg, const CellKey& key) {
  const CellPaths paths = cell_paths(cfg, key);
  if (!fs::exists(paths.log_csv) || !fs::exists(paths.best_ckpt) || !fs::exists(paths.final_ckpt)) {
    return false;
  }
  const LoggedRun run = read_training_log(paths.log_csv);
  const std::string expected = cell_digest(cfg, key);
  if (run.digest != expected) {
    throw DataError("sweep cell '" + paths.log_csv + "' carries digest " + run.digest +
                    " but the current configuration implies " + expected +
                    "; refusing to mix artifacts (use a fresh out dir)");
  }
  return true;
}

void run_cell(const ExperimentConfig& cfg, const CellKey& key, SampleCache& cache) {
  const bool needs_labels = regime_needs_labels(key.kind);
  const std::vector<TrainSample>& full_train = cache.get(key.k, "train", needs_labels);
  const std::vector<TrainSample>& test = cache.get(key.k, "test", true);

  std::vector<TrainSample> subset;
  const std::vector<TrainSample>* train_ptr = &full_train;
  if (key.n_train < static_cast<int>(full_train.size())) {
    const std::uint64_t sseed =
        Rng::derive(cfg.master_seed, {stream::kSubsetOrder, std::uint64_t(key.k)}).next_u64();
    const std::vector<int> order = subset_order(static_cast<int>(full_train.size()), sseed);
    subset.reserve(static_cast<size_t>(key.n_train));
    for (int i = 0; i < key.n_train; ++i) {
      subset.push_back(full_train[static_cast<size_t>(order[static_cast<size_t>(i)])]);
    }
    train_ptr = &subset;
  } else if (key.n_train > static_cast<int>(full_train.size())) {
    throw DataError("sweep cell needs " + std::to_string(key.n_train) +
                    " training samples but the dataset has " + std::to_string(full_train.size()));
  }

  TrainingRegime regime = cfg.regime;
  regime.kind = key.kind;
  const TrainResult result =
      train(*train_ptr, test, regime, cfg.sys, cfg.dims(), cfg.leaky_slope, key.seed);

  const CellPaths paths = cell_paths(cfg, key);
  const std::string digest = cell_digest(cfg, key);
  save_checkpoint(paths.best_ckpt, result.best_model, digest);
  save_checkpoint(paths.final_ckpt, result.final_model, digest);
  write_training_log(paths.log_csv, digest, key.k, regime_name(key.kind), key.seed, result.log);
}

// Ensures all cells exist (training the missing ones) and returns their logs.
std::map<std::string, CellResult> ensure_cells(const ExperimentConfig& cfg,
                                               const std::vector<CellKey>& keys) {
  ensure_dir(cfg.out_dir + "/cells");
  SampleCache cache(cfg);

  std::vector<const CellKey*> missing;
  for (const CellKey& key : keys) {
    if (!cell_complete(cfg, key)) missing.push_back(&key);
  }

  // Preload every dataset the missing cells touch; afterwards the cache is
  // read-only and the cells can run concurrently.
  for (const CellKey* key : missing) {
    cache.get(key->k, "train", regime_needs_labels(key->kind));
    cache.get(key->k, "test", true);
  }
  parallel_for(static_cast<int>(missing.size()), cfg.threads,
               [&](int i) { run_cell(cfg, *missing[static_cast<size_t>(i)], cache); });

  std::map<std::string, CellResult> results;
  for (const CellKey& key : keys) {
    const CellPaths paths = cell_paths(cfg, key);
    CellResult res;
    res.metrics = read_training_log(paths.log_csv).metrics;
    res.best_ckpt = paths.best_ckpt;
    results.emplace(cell_stem(key), std::move(res));
  }
  return results;
}

void require_datasets(const ExperimentConfig& cfg, const std::vector<int>& ks) {
  std::vector<std::string> missing;
  for (int k : ks) {
    for (const char* split : {"train", "test"}) {
      const std::string path = dataset_path(cfg, k, split);
      if (!fs::exists(path)) missing.push_back(path);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing datasets:";
    for (const std::string& p : missing) msg += " " + p;
    msg += " (run `linksched generate` and `linksched label` first)";
    throw DataError(msg);
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void write_csv(const std::string& path, const std::string& digest, const std::string& header,
               const std::vector<std::string>& rows) {
  atomic_write(path, [&](const std::string& tmp) {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot open '" + tmp + "'");
    out << "# linksched digest=" << digest << "\n" << header << "\n";
    for (const std::string& row : rows) out << row << "\n";
    if (!out) throw DataError("write failed for '" + tmp + "'");
  });
}

std::vector<RegimeKind> base_regimes() {
  return {RegimeKind::kSupervised, RegimeKind::kUnsupervised};
}

void sweep_fig2a(const ExperimentConfig& cfg);
void sweep_fig2b(const ExperimentConfig& cfg);
void sweep_fig2c(const ExperimentConfig& cfg);
void sweep_fig2d(const ExperimentConfig& cfg);

void sweep_fig2a(const ExperimentConfig& cfg) {
  require_datasets(cfg, cfg.k_list);
  std::vector<CellKey> keys;
  for (int k : cfg.k_list) {
    for (RegimeKind kind : base_regimes()) {
      for (std::uint64_t seed : cfg.train_seeds) {
        keys.push_back({k, kind, seed, cfg.n_train});
      }
    }
  }
  const auto cells = ensure_cells(cfg, keys);

  std::vector<std::string> rows;
  for (int k : cfg.k_list) {
    for (RegimeKind kind : base_regimes()) {
      std::vector<double> best;
      for (std::uint64_t seed : cfg.train_seeds) {
        const CellResult& cell = cells.at(cell_stem({k, kind, seed, cfg.n_train}));
        best.push_back(*std::max_element(cell.metrics.begin(), cell.metrics.end()));
      }
      rows.push_back(std::to_string(k) + "," + regime_name(kind) + "," + fmt12(mean_of(best)) +
                     "," + fmt12(sample_stdev(best)));
    }
  }
  write_csv(cfg.out_dir + "/fig2a.csv", cfg.full_digest(), "k,regime,mean,std", rows);
  if (!cfg.quiet) std::cout << "wrote " << cfg.out_dir << "/fig2a.csv\n";
}

void sweep_fig2b(const ExperimentConfig& cfg) {
  require_datasets(cfg, cfg.k_list);
  const std::vector<RegimeKind> kinds = {
      RegimeKind::kSupervised, RegimeKind::kUnsupervised, RegimeKind::kSslThenSupervised,
      RegimeKind::kSslThenUnsupervised};
  std::vector<CellKey> keys;
  for (int k : cfg.k_list) {
    for (RegimeKind kind : kinds) {
      for (std::uint64_t seed : cfg.train_seeds) {
        keys.push_back({k, kind, seed, cfg.n_train});
      }
    }
  }
  const auto cells = ensure_cells(cfg, keys);

  std::vector<std::string> rows;
  std::vector<std::string> per_seed_rows;
  int excluded = 0;
  for (int k : cfg.k_list) {
    for (RegimeKind kind : kinds) {
      const RegimeKind base = regime_main_phase(kind);
      const int ssl_flag = regime_has_ssl(kind) ? 1 : 0;
      std::vector<double> epochs;
      for (std::uint64_t seed : cfg.train_seeds) {
        const CellResult& cell = cells.at(cell_stem({k, kind, seed, cfg.n_train}));
        const auto ep = convergence_epoch(cell.metrics, cfg.convergence_threshold);
        per_seed_rows.push_back(std::to_string(k) + "," + regime_name(base) + "," +
                                std::to_string(ssl_flag) + "," + std::to_string(seed) + "," +
                                (ep ? std::to_string(*ep) : "none"));
        if (ep) {
          epochs.push_back(static_cast<double>(*ep));
        } else {
          ++excluded;
        }
      }
      rows.push_back(std::to_string(k) + "," + regime_name(base) + "," +
                     std::to_string(ssl_flag) + "," +
                     (epochs.empty() ? "none" : fmt12(mean_of(epochs))));
    }
  }
  write_csv(cfg.out_dir + "/fig2b.csv", cfg.full_digest(), "k,regime,ssl_flag,convergence_epoch",
            rows);
  write_csv(cfg.out_dir + "/fig2b_per_seed.csv", cfg.full_digest(),
            "k,regime,ssl_flag,seed,convergence_epoch", per_seed_rows);
  if (!cfg.quiet) {
    std::cout << "wrote " << cfg.out_dir << "/fig2b.csv (" << excluded
              << " non-converged seed runs excluded from means)\n";
  }
}

void sweep_fig2c(const ExperimentConfig& cfg) {
  require_datasets(cfg, cfg.k_train_list);
  std::vector<CellKey> keys;
  for (int k : cfg.k_train_list) {
    for (RegimeKind kind : base_regimes()) {
      for (int n : cfg.sample_sizes) {
        for (std::uint64_t seed : cfg.train_seeds) {
          keys.push_back({k, kind, seed, n});
        }
      }
    }
  }
  const auto cells = ensure_cells(cfg, keys);

  std::vector<std::string> rows;
  for (int k : cfg.k_train_list) {
    for (int n : cfg.sample_sizes) {
      for (RegimeKind kind : base_regimes()) {
        std::vector<double> best;
        for (std::uint64_t seed : cfg.train_seeds) {
          const CellResult& cell = cells.at(cell_stem({k, kind, seed, n}));
          best.push_back(*std::max_element(cell.metrics.begin(), cell.metrics.end()));
        }
        rows.push_back(std::to_string(k) + "," + std::to_string(n) + "," + regime_name(kind) +
                       "," + fmt12(mean_of(best)) + "," + fmt12(sample_stdev(best)));
      }
    }
  }
  write_csv(cfg.out_dir + "/fig2c.csv", cfg.full_digest(), "k,n_train,regime,mean,std", rows);
  if (!cfg.quiet) std::cout << "wrote " << cfg.out_dir << "/fig2c.csv\n";
}

void sweep_fig2d(const ExperimentConfig& cfg) {
  std::vector<int> needed = cfg.k_list;
  for (int k : cfg.k_train_list) {
    if (std::find(needed.begin(), needed.end(), k) == needed.end()) needed.push_back(k);
  }
  require_datasets(cfg, needed);

  std::vector<CellKey> keys;
  for (int k : cfg.k_train_list) {
    for (RegimeKind kind : base_regimes()) {
      for (std::uint64_t seed : cfg.train_seeds) {
        keys.push_back({k, kind, seed, cfg.n_train});
      }
    }
  }
  const auto cells = ensure_cells(cfg, keys);

  SampleCache cache(cfg);
  std::vector<std::string> rows;
  for (int k_train : cfg.k_train_list) {
    for (RegimeKind kind : base_regimes()) {
      std::vector<GnnModel> models;
      for (std::uint64_t seed : cfg.train_seeds) {
        const CellResult& cell = cells.at(cell_stem({k_train, kind, seed, cfg.n_train}));
        models.push_back(load_checkpoint(cell.best_ckpt).model);
      }
      std::vector<std::pair<int, const std::vector<TrainSample>*>> test_sets;
      for (int k_test : cfg.k_list) {
        test_sets.emplace_back(k_test, &cache.get(k_test, "test", true));
      }
      for (const GeneralizationRow& row :
           generalization_sweep(models, k_train, test_sets, regime_name(kind), cfg.sys)) {
        rows.push_back(std::to_string(row.k_train) + "," + std::to_string(row.k_test) + "," +
                       row.regime + "," + fmt12(row.mean) + "," + fmt12(row.stdev));
      }
    }
  }
  write_csv(cfg.out_dir + "/fig2d.csv", cfg.full_digest(), "k_train,k_test,regime,mean,std",
            rows);
  if (!cfg.quiet) std::cout << "wrote " << cfg.out_dir << "/fig2d.csv\n";
}

}  // namespace

std::string dataset_path(const ExperimentConfig& cfg, int k, const std::string& split) {
  return cfg.out_dir + "/k" + std::to_string(k) + "_" + split + ".ds";
}

std::vector<TrainSample> samples_from_dataset(const Dataset& ds, bool require_labels) {
  std::vector<TrainSample> samples;
  samples.reserve(ds.records.size());
  for (const DatasetRecord& rec : ds.records) {
    if (require_labels && !rec.label) {
      throw DataError("dataset record " + std::to_string(rec.id) +
                      " is unlabeled; run `linksched label` first");
    }
    TrainSample s;
    s.channel = rec.channel;
    s.graph = build_graph(rec.channel, ds.sys);
    if (rec.label) {
      s.has_label = true;
      s.label = rec.label->bits;
      s.opt_sum_rate = rec.label->opt_sum_rate;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

void cmd_generate(const ExperimentConfig& cfg, const std::vector<int>& ks,
                  const std::vector<std::string>& splits) {
  ensure_dir(cfg.out_dir);
  for (int k : ks) {
    for (const std::string& split : splits) {
      if (split != "train" && split != "test") {
        throw ConfigError("generate: split must be 'train' or 'test', got '" + split + "'");
      }
      const int n = split == "train" ? cfg.n_train : cfg.n_test;
      const std::uint64_t tag = split == "train" ? stream::kTrainSplit : stream::kTestSplit;

      Dataset ds;
      ds.digest = cfg.data_digest(k, split, n);
      ds.k = k;
      ds.split = split;
      ds.sys = cfg.sys;
      ds.geom = cfg.geom;
      ds.pl = cfg.pl;
      ds.records.resize(static_cast<size_t>(n));
      parallel_for(n, cfg.threads, [&](int i) {
        DatasetRecord& rec = ds.records[static_cast<size_t>(i)];
        rec.id = static_cast<std::uint64_t>(i);
        rec.seed = Rng::derive(cfg.master_seed, {tag, std::uint64_t(k), std::uint64_t(i)})
                       .next_u64();
        rec.channel = generate_sample(k, cfg.geom, cfg.pl, rec.seed);
      });

      const std::string path = dataset_path(cfg, k, split);
      atomic_write(path, [&](const std::string& tmp) { write_dataset(tmp, ds); });
      if (!cfg.quiet) {
        std::cout << "wrote " << path << " (" << n << " samples, k=" << k << ")\n";
      }
    }
  }
}

void cmd_label(const ExperimentConfig& cfg, const std::vector<std::string>& paths) {
  for (const std::string& path : paths) {
    Dataset ds = read_dataset(path);
    if (ds.k > cfg.k_max_exhaustive) {
      throw DataError("label: k=" + std::to_string(ds.k) + " exceeds oracle.k_max_exhaustive=" +
                      std::to_string(cfg.k_max_exhaustive));
    }
    std::vector<int> todo;
    for (size_t i = 0; i < ds.records.size(); ++i) {
      if (!ds.records[i].label) todo.push_back(static_cast<int>(i));
    }
    parallel_for(static_cast<int>(todo.size()), cfg.threads, [&](int t) {
      DatasetRecord& rec = ds.records[static_cast<size_t>(todo[static_cast<size_t>(t)])];
      const LabeledSample labeled = exhaustive_search(rec.channel, ds.sys, cfg.k_max_exhaustive);
      rec.label = DatasetLabel{labeled.optimal_schedule.bits(), labeled.optimal_sum_rate,
                               labeled.label_wallclock_s};
    });
    if (!todo.empty()) {
      atomic_write(path, [&](const std::string& tmp) { write_dataset(tmp, ds); });
    }
    if (!cfg.quiet) {
      std::cout << path << ": labeled " << todo.size() << " records (" << ds.records.size()
                << " total)\n";
    }
  }
}

void cmd_train(const ExperimentConfig& cfg, int k) {
  const bool needs_labels = regime_needs_labels(cfg.regime.kind);
  const std::vector<TrainSample> train_set = load_samples(cfg, k, "train", needs_labels);
  const std::vector<TrainSample> test_set = load_samples(cfg, k, "test", true);
  ensure_dir(cfg.out_dir);

  for (std::uint64_t seed : cfg.train_seeds) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult result =
        train(train_set, test_set, cfg.regime, cfg.sys, cfg.dims(), cfg.leaky_slope, seed);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string digest = cfg.full_digest();
    const std::string base = cfg.out_dir + "/train_k" + std::to_string(k) + "_" +
                             regime_name(cfg.regime.kind) + "_s" + std::to_string(seed);
    write_training_log(base + ".csv", digest, k, regime_name(cfg.regime.kind), seed, result.log);
    save_checkpoint(base + ".best.ckpt", result.best_model, digest);
    save_checkpoint(base + ".final.ckpt", result.final_model, digest);

    atomic_write(base + ".manifest", [&](const std::string& tmp) {
      std::ofstream out(tmp);
      if (!out) throw DataError("cannot open '" + tmp + "'");
      out << "digest " << digest << "\n";
      out << "k " << k << "\n";
      out << "regime " << regime_name(cfg.regime.kind) << "\n";
      out << "seed " << seed << "\n";
      out << "epochs " << cfg.regime.epochs << "\n";
      out << "best_epoch " << result.best_epoch << "\n";
      out << "best_metric " << fmt12(result.best_metric) << "\n";
      out << "wallclock_s " << fmt12(wall) << "\n";
    });

    if (!cfg.quiet) {
      std::cout << "k=" << k << " " << regime_name(cfg.regime.kind) << " seed=" << seed
                << ": best " << fmt12(result.best_metric) << " @ epoch " << result.best_epoch
                << " (" << fmt12(wall) << " s)\n";
    }
  }
}

EvalOutput cmd_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                    const std::string& test_data_path, const std::string& csv_path) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  if (!ck.config_digest.empty() && ck.config_digest != cfg.full_digest()) {
    throw DataError("checkpoint '" + checkpoint_path + "' carries digest " + ck.config_digest +
                    " but the current configuration implies " + cfg.full_digest() +
                    "; refusing to mix artifacts");
  }
  const Dataset ds = read_dataset(test_data_path);
  const std::string expected = cfg.data_digest(ds.k, ds.split, static_cast<int>(ds.records.size()));
  if (ds.digest != expected) {
    throw DataError("dataset '" + test_data_path +
                    "' was produced by a different configuration; refusing to mix artifacts");
  }
  const std::vector<TrainSample> samples = samples_from_dataset(ds, true);

  EvalOutput out;
  out.report = evaluate(ck.model, samples, cfg.sys);

  double allon_achieved = 0.0;
  double optimal = 0.0;
  for (const TrainSample& s : samples) {
    allon_achieved += sum_rate(s.channel, Schedule::all_on(s.channel.k()), cfg.sys);
    optimal += s.opt_sum_rate;
  }
  out.all_on_metric = allon_achieved / optimal;

  if (!csv_path.empty()) {
    std::vector<std::string> rows;
    for (size_t i = 0; i < out.report.achieved.size(); ++i) {
      rows.push_back(std::to_string(i) + "," + fmt12(out.report.achieved[i]) + "," +
                     fmt12(out.report.optimal[i]) + "," +
                     fmt12(out.report.achieved[i] / out.report.optimal[i]));
    }
    write_csv(csv_path, cfg.full_digest(), "sample,achieved,optimal,ratio", rows);
  }

  if (!cfg.quiet) {
    std::cout << "normalized sum-rate (ratio of sums): " << fmt12(out.report.ratio_of_sums)
              << "\n";
    std::cout << "normalized sum-rate (mean of ratios): " << fmt12(out.report.mean_of_ratios)
              << "\n";
    std::cout << "all-on baseline:                      " << fmt12(out.all_on_metric) << "\n";
  }
  return out;
}

void cmd_sweep(const ExperimentConfig& cfg, const std::string& study) {
  ensure_dir(cfg.out_dir);
  if (study == "fig2a") {
    sweep_fig2a(cfg);
  } else if (study == "fig2b") {
    sweep_fig2b(cfg);
  } else if (study == "fig2c") {
    sweep_fig2c(cfg);
  } else if (study == "fig2d") {
    sweep_fig2d(cfg);
  } else if (study == "all") {
    sweep_fig2a(cfg);
    sweep_fig2b(cfg);
    sweep_fig2c(cfg);
    sweep_fig2d(cfg);
  } else {
    throw ConfigError("sweep: unknown study '" + study +
                      "' (expected fig2a, fig2b, fig2c, fig2d, or all)");
  }
}

void cmd_bench_labeling(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const std::vector<BenchRow> rows = label_timing_benchmark(
      cfg.bench_k, cfg.bench_samples, cfg.sys, cfg.geom, cfg.pl, cfg.master_seed,
      cfg.k_max_exhaustive);
  std::vector<std::string> lines;
  for (const BenchRow& row : rows) {
    lines.push_back(std::to_string(row.k) + "," + fmt_time6e(row.t_unlabeled_s) + "," +
                    fmt_time6e(row.t_labeled_s) + "," + std::to_string(row.evals));
  }
  const std::string path = cfg.out_dir + "/bench_labeling.csv";
  write_csv(path, cfg.full_digest(), "k,t_unlabeled_s,t_labeled_s,evals", lines);
  if (!cfg.quiet) std::cout << "wrote " << path << "\n";
}

void cmd_validate(const ExperimentConfig& cfg, const std::vector<std::string>& paths, bool deep) {
  for (const std::string& path : paths) {
    const Dataset ds = read_dataset(path);
    validate_dataset(ds, deep, cfg.k_max_exhaustive);
    if (!cfg.quiet) {
      std::cout << "OK " << path << ": " << ds.records.size() << " records, " << ds.n_labeled()
                << " labeled, k=" << ds.k << ", digest=" << ds.digest << (deep ? " (deep)" : "")
                << "\n";
    }
  }
}

}  // namespace linksched
