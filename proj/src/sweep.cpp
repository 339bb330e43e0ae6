#include "gfred/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>
#include <tuple>

#include "gfred/error.hpp"
#include "gfred/optimizer.hpp"
#include "gfred/pca.hpp"
#include "gfred/sampling.hpp"
#include "gfred/spectral.hpp"

namespace gfred {

namespace {

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(Errc::ConfigError, "invalid value '" + value + "' for " + key);
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) bad_value(key, value);
    return v;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (item.empty()) bad_value(key, value);
    out.push_back(static_cast<int>(parse_int(key, item)));
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& raw_key,
                        const std::string& raw_value) {
  const std::string key = strip(raw_key);
  const std::string value = strip(raw_value);
  if (key == "dataset-path") {
    cfg.dataset_path = value;
  } else if (key == "labels-path") {
    cfg.labels_path = value;
  } else if (key == "dataset-format") {
    if (value == "idx") cfg.dataset_format = DatasetFormat::Idx;
    else if (value == "csv") cfg.dataset_format = DatasetFormat::CsvMatrix;
    else if (value == "synthetic") cfg.dataset_format = DatasetFormat::Synthetic;
    else bad_value(key, value);
  } else if (key == "csv-label-row") {
    cfg.csv_label_row = parse_bool(key, value);
  } else if (key == "synthetic-pool") {
    cfg.synthetic_pool = static_cast<int>(parse_int(key, value));
  } else if (key == "classes-to-pick") {
    cfg.classes_to_pick = static_cast<int>(parse_int(key, value));
  } else if (key == "images-per-class") {
    cfg.images_per_class = static_cast<int>(parse_int(key, value));
  } else if (key == "trials") {
    cfg.trials = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(value, &used, 0);
      if (used != value.size()) bad_value(key, value);
    } catch (const std::logic_error&) {
      bad_value(key, value);
    }
  } else if (key == "kernel") {
    if (value == "cosine") cfg.similarity.kernel = Kernel::Cosine;
    else if (value == "gaussian") cfg.similarity.kernel = Kernel::Gaussian;
    else bad_value(key, value);
  } else if (key == "alpha") {
    cfg.similarity.alpha = parse_double(key, value);
  } else if (key == "knn") {
    cfg.similarity.knn = static_cast<int>(parse_int(key, value));
  } else if (key == "symmetrization") {
    if (value == "union") cfg.similarity.symmetrization = Symmetrization::Union;
    else if (value == "mutual") cfg.similarity.symmetrization = Symmetrization::Mutual;
    else bad_value(key, value);
  } else if (key == "normalize-spectrum") {
    cfg.similarity.normalize_spectrum = parse_bool(key, value);
  } else if (key == "k-list") {
    cfg.k_list = parse_int_list(key, value);
  } else if (key == "l-list" || key == "L-list") {
    cfg.L_list = parse_int_list(key, value);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_double(key, value);
  } else if (key == "max-iters") {
    cfg.max_iters = static_cast<int>(parse_int(key, value));
  } else if (key == "warm-start") {
    cfg.warm_start = parse_bool(key, value);
  } else if (key == "record-wall-time") {
    cfg.record_wall_time = parse_bool(key, value);
  } else {
    throw Error(Errc::ConfigError, "unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    apply_config_entry(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows) {
  std::map<std::pair<int, int>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows)
    if (!r.failed) groups[{r.k, r.L}].push_back(&r);

  std::vector<SweepAggregate> out;
  for (const auto& [key, members] : groups) {
    SweepAggregate a;
    a.k = key.first;
    a.L = key.second;
    a.count = static_cast<int>(members.size());
    for (const auto* r : members) {
      a.mean_final_mse += r->final_mse;
      a.mean_pca_mse += r->pca_mse;
    }
    a.mean_final_mse /= a.count;
    a.mean_pca_mse /= a.count;
    if (a.count > 1) {
      double ss = 0.0;
      for (const auto* r : members) ss += (r->final_mse - a.mean_final_mse) * (r->final_mse - a.mean_final_mse);
      a.std_final_mse = std::sqrt(ss / (a.count - 1));
    }
    out.push_back(a);
  }
  return out;
}

LabeledData load_dataset(const ExperimentConfig& cfg) {
  switch (cfg.dataset_format) {
    case DatasetFormat::Idx:
      return load_idx(cfg.dataset_path, cfg.labels_path);
    case DatasetFormat::CsvMatrix:
      return load_csv_matrix(cfg.dataset_path, cfg.csv_label_row);
    case DatasetFormat::Synthetic:
      return synthetic_digits(10, cfg.synthetic_pool, cfg.seed);
  }
  throw Error(Errc::ConfigError, "unknown dataset format");
}

namespace {

void validate(const ExperimentConfig& cfg, const LabeledData& data) {
  if (cfg.trials < 1) throw Error(Errc::ConfigError, "trials must be >= 1");
  if (cfg.max_iters < 0) throw Error(Errc::ConfigError, "max-iters must be >= 0");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw Error(Errc::ConfigError, "epsilon must be > 0");
  if (cfg.classes_to_pick < 1 || cfg.images_per_class < 1)
    throw Error(Errc::ConfigError, "classes-to-pick and images-per-class must be >= 1");
  const long long n = static_cast<long long>(cfg.classes_to_pick) * cfg.images_per_class;
  const long long D = data.X.rows();
  for (int k : cfg.k_list)
    if (k < 1 || k > std::min(n, D))
      throw Error(Errc::ConfigError, "k=" + std::to_string(k) + " outside [1, min(D,n)=" +
                                         std::to_string(std::min(n, D)) + "]");
  for (int L : cfg.L_list)
    if (L < 0) throw Error(Errc::ConfigError, "filter orders must be >= 0");
  if (cfg.similarity.knn < 1 || cfg.similarity.knn > n - 1)
    throw Error(Errc::ConfigError, "knn must lie in [1, n-1]");
  if (cfg.similarity.kernel == Kernel::Gaussian && !(cfg.similarity.alpha > 0.0))
    throw Error(Errc::ConfigError, "alpha must be > 0 for the Gaussian kernel");
}

std::vector<SweepRow> run_trial(const ExperimentConfig& cfg, const LabeledData& data, int trial,
                                const std::vector<int>& ks, const std::vector<int>& Ls) {
  using clock = std::chrono::steady_clock;
  std::vector<SweepRow> rows;
  auto fail_all = [&](const std::string& why) {
    rows.clear();
    for (int k : ks)
      for (int L : Ls) rows.push_back({trial, k, L, -1, NAN, NAN, NAN, 0.0, true, why});
  };

  CenteredDataset ds;
  GraphSpectrum spectrum;
  std::map<int, SpectralCache> caches;
  try {
    const SubsetSpec spec{cfg.classes_to_pick, cfg.images_per_class, cfg.seed};
    const Subset subset = sample_subset(data, spec, static_cast<std::uint64_t>(trial));
    ds = center(subset.X);
    spectrum = build_graph(subset.X, cfg.similarity);
    for (int L : Ls) caches.emplace(L, build_cache(ds.Xbar, spectrum, L));
  } catch (const std::exception& e) {
    fail_all(e.what());
    return rows;
  }
  const std::uint64_t fingerprint = spectrum_fingerprint(spectrum);
  const FitOptions opts{cfg.epsilon, cfg.max_iters};

  for (int k : ks) {
    double pca = NAN;
    try {
      pca = pca_mse(ds, pca_fit(ds, k));
    } catch (const std::exception&) {
    }
    std::optional<std::pair<int, Filters>> previous;
    for (int L : Ls) {
      SweepRow row;
      row.trial = trial;
      row.k = k;
      row.L = L;
      row.pca_mse = pca;
      const auto start = clock::now();
      try {
        const SpectralCache& cache = caches.at(L);
        FitResult best = fit_from(cache, init(ds, cache, k), ds.mean, fingerprint, opts);
        if (cfg.warm_start && previous) {
          const Filters lifted = warm_start(cache, caches.at(previous->first), previous->second);
          FitResult warm = fit_from(cache, lifted, ds.mean, fingerprint, opts);
          if (warm.objective_trace.back() < best.objective_trace.back()) best = std::move(warm);
        }
        row.iterations = best.iterations;
        row.initial_mse = best.objective_trace.front();
        row.final_mse = best.objective_trace.back();
        previous.emplace(L, best.model.filters());
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        row.iterations = -1;
        row.initial_mse = row.final_mse = NAN;
        previous.reset();
      }
      if (cfg.record_wall_time)
        row.wall_time_ms =
            std::chrono::duration<double, std::milli>(clock::now() - start).count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& cfg, const LabeledData& data, int threads) {
  validate(cfg, data);
  const std::vector<int> ks = sorted_unique(cfg.k_list);
  const std::vector<int> Ls = sorted_unique(cfg.L_list);

  std::vector<std::vector<SweepRow>> per_trial(static_cast<std::size_t>(cfg.trials));
  const int workers = std::clamp(threads, 1, cfg.trials);
  if (workers == 1) {
    for (int t = 0; t < cfg.trials; ++t) per_trial[t] = run_trial(cfg, data, t, ks, Ls);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t = next++; t < cfg.trials; t = next++)
          per_trial[static_cast<std::size_t>(t)] = run_trial(cfg, data, t, ks, Ls);
      });
    for (auto& th : pool) th.join();
  }

  SweepReport report;
  for (auto& rows : per_trial)
    for (auto& r : rows) report.rows.push_back(std::move(r));
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.trial, a.k, a.L) < std::tie(b.trial, b.k, b.L);
  });
  report.aggregates = aggregate(report.rows);
  return report;
}

SweepReport run_sweep(const ExperimentConfig& cfg, int threads) {
  return run_sweep(cfg, load_dataset(cfg), threads);
}

int threads_from_env() {
  const char* env = std::getenv("GFRED_THREADS");
  if (!env) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::logic_error&) {
    return 1;
  }
}

}  // namespace gfred
