// gfred: command line front end for graph-filter dimensionality reduction.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfred/codec.hpp"
#include "gfred/dataset.hpp"
#include "gfred/error.hpp"
#include "gfred/graph.hpp"
#include "gfred/optimizer.hpp"
#include "gfred/pca.hpp"
#include "gfred/report.hpp"
#include "gfred/sampling.hpp"
#include "gfred/sweep.hpp"

namespace {

using namespace gfred;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 1;

const char* const kConfigKeys[] = {
    "dataset-path", "labels-path",  "dataset-format", "csv-label-row",      "synthetic-pool",
    "classes-to-pick", "images-per-class", "trials",  "seed",               "kernel",
    "alpha",        "knn",          "symmetrization", "normalize-spectrum", "k-list",
    "l-list",       "epsilon",      "max-iters",      "warm-start",         "record-wall-time",
};

// Config file plus per-key flag overrides, shared by every data-consuming subcommand.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd, bool with_data_aliases) {
    cmd->add_option("--config", config_path, "key = value experiment config");
    for (const char* key : kConfigKeys)
      cmd->add_option(std::string("--") + key, values[key]);
    if (with_data_aliases) {
      cmd->add_option("--data", values["dataset-path"], "dataset file (IDX images or CSV)");
      cmd->add_option("--labels", values["labels-path"], "IDX label file");
      cmd->add_option("--format", values["dataset-format"], "idx | csv | synthetic");
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const char* key : kConfigKeys) {
      const std::string& v = values.at(key);
      if (!v.empty()) apply_config_entry(cfg, key, v);
    }
    return cfg;
  }
};

// The node signals one fit works on: a class-balanced subset when labels are
// available, otherwise every column of the dataset.
Eigen::MatrixXd load_points(const ExperimentConfig& cfg, int trial) {
  const LabeledData data = load_dataset(cfg);
  if (data.labels.empty()) return data.X;
  const SubsetSpec spec{cfg.classes_to_pick, cfg.images_per_class, cfg.seed};
  return sample_subset(data, spec, static_cast<std::uint64_t>(trial)).X;
}

void check_knn(const SimilarityConfig& sim, Eigen::Index n) {
  if (sim.knn < 1 || sim.knn > n - 1)
    throw Error(Errc::KnnTooLarge, "knn=" + std::to_string(sim.knn) + " needs 1 <= knn <= n-1 = " +
                                       std::to_string(n - 1));
}

Eigen::MatrixXd centered_with(const Eigen::MatrixXd& X, const Eigen::VectorXd& mean) {
  if (X.rows() != mean.size())
    throw Error(Errc::DimensionMismatch, "data has " + std::to_string(X.rows()) +
                                             " rows but the model expects " +
                                             std::to_string(mean.size()));
  return X.colwise() - mean;
}

void print_budget(const StorageBudget& b) {
  std::printf("stored_scalars=%lld raw_scalars=%lld pca_scalars=%lld compresses=%s\n",
              static_cast<long long>(b.stored_scalars), static_cast<long long>(b.raw_scalars),
              static_cast<long long>(b.pca_scalars), b.compresses() ? "yes" : "no");
}

int cmd_bound(std::int64_t n, std::int64_t D, std::int64_t L) {
  const std::int64_t k = compression_bound(n, D, L);
  std::printf("compression bound: %lld (closed form %.6f)\n", static_cast<long long>(k),
              compression_bound_value(n, D, L));
  auto line = [&](std::int64_t kk) {
    const StorageBudget b = StorageBudget::compute(n, D, kk, L);
    std::printf("k=%lld: stored_scalars=%lld %s nD=%lld\n", static_cast<long long>(kk),
                static_cast<long long>(b.stored_scalars), b.compresses() ? "<" : ">=",
                static_cast<long long>(b.raw_scalars));
  };
  if (k >= 1) line(k);
  line(k + 1);
  return 0;
}

int cmd_graph(const ConfigFlags& flags, int trial, const std::string& eig_out) {
  const ExperimentConfig cfg = flags.resolve();
  const Eigen::MatrixXd X = load_points(cfg, trial);
  check_knn(cfg.similarity, X.cols());
  const GraphSpectrum sp = build_graph(X, cfg.similarity);
  const Eigen::Index edges = (sp.S.array() != 0.0).count() / 2;
  std::printf("n=%lld D=%lld edges=%lld lambda_max=%.17g lambda_min=%.17g fingerprint=%016llx\n",
              static_cast<long long>(sp.n()), static_cast<long long>(X.rows()),
              static_cast<long long>(edges), sp.lambda[0], sp.lambda[sp.n() - 1],
              static_cast<unsigned long long>(spectrum_fingerprint(sp)));
  if (!eig_out.empty()) write_csv_matrix(eig_out, sp.lambda.transpose());
  return 0;
}

int cmd_fit(const ConfigFlags& flags, int trial, int k, int L, const std::string& model_out) {
  const ExperimentConfig cfg = flags.resolve();
  if (L < 0) throw Error(Errc::ConfigError, "--l must be >= 0");
  const Eigen::MatrixXd X = load_points(cfg, trial);
  if (k < 1 || k > std::min(X.rows(), X.cols()))
    throw Error(Errc::ConfigError, "--k must lie in [1, min(D,n)]");
  check_knn(cfg.similarity, X.cols());
  const CenteredDataset ds = center(X);
  const GraphSpectrum sp = build_graph(X, cfg.similarity);
  const FitResult r = fit(ds, sp, k, L, FitOptions{cfg.epsilon, cfg.max_iters});
  const SpectralCache cache = build_cache(ds.Xbar, sp, L);
  const ReducedData codes = reduce(r.model, ds, sp, cache);
  save_model(model_out, r.model, sp, codes.Y);
  std::printf("n=%lld D=%lld k=%d L=%d iterations=%d converged=%s\n",
              static_cast<long long>(ds.n()), static_cast<long long>(ds.D()), k, L, r.iterations,
              r.converged ? "yes" : "no");
  std::printf("initial_mse=%.17g final_mse=%.17g pca_mse=%.17g\n", r.objective_trace.front(),
              r.objective_trace.back(), pca_mse(ds, pca_fit(ds, k)));
  print_budget(StorageBudget::compute(ds.n(), ds.D(), k, L));
  return 0;
}

int cmd_encode(const ConfigFlags& flags, int trial, const std::string& model_path,
               const std::string& out) {
  const StoredModel stored = load_model(model_path);
  const Eigen::MatrixXd X = load_points(flags.resolve(), trial);
  if (X.cols() != stored.spectrum.n())
    throw Error(Errc::DimensionMismatch, "data has " + std::to_string(X.cols()) +
                                             " columns but the graph has " +
                                             std::to_string(stored.spectrum.n()) + " nodes");
  CenteredDataset ds;
  ds.Xbar = centered_with(X, stored.model.mean);
  ds.mean = stored.model.mean;
  const SpectralCache cache = build_cache(ds.Xbar, stored.spectrum, stored.model.L);
  write_csv_matrix(out, reduce(stored.model, ds, stored.spectrum, cache).Y);
  return 0;
}

int cmd_decode(const std::string& model_path, const std::string& codes_path,
               const std::string& out) {
  const StoredModel stored = load_model(model_path);
  ReducedData codes{stored.Y, Domain::Vertex};
  if (!codes_path.empty()) codes.Y = load_csv_matrix(codes_path).X;
  write_csv_matrix(out, reconstruct(stored.model, codes, stored.spectrum));
  return 0;
}

int cmd_eval(const ConfigFlags& flags, int trial, const std::string& model_path, bool have_data) {
  const StoredModel stored = load_model(model_path);
  std::printf("n=%lld D=%lld k=%d L=%d\n", static_cast<long long>(stored.spectrum.n()),
              static_cast<long long>(stored.model.mean.size()), stored.model.k, stored.model.L);
  print_budget(stored.budget);
  if (!have_data) return 0;
  const Eigen::MatrixXd X = load_points(flags.resolve(), trial);
  if (X.cols() != stored.spectrum.n())
    throw Error(Errc::DimensionMismatch, "data column count does not match the graph");
  const Eigen::MatrixXd Xhat = reconstruct(stored.model, {stored.Y, Domain::Vertex}, stored.spectrum);
  const Eigen::MatrixXd Xbar = centered_with(X, stored.model.mean);
  CenteredDataset ds{Xbar, stored.model.mean};
  std::printf("reconstruction_mse=%.17g\n", (X - Xhat).squaredNorm() / static_cast<double>(X.cols()));
  std::printf("pca_mse=%.17g\n", pca_mse(ds, pca_fit(ds, stored.model.k)));
  return 0;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& out_csv, const std::string& out_svg,
              bool serial) {
  const ExperimentConfig cfg = flags.resolve();
  const SweepReport report = run_sweep(cfg, serial ? 1 : threads_from_env());
  emit_csv(report, out_csv);
  if (!out_svg.empty()) emit_svg(report, out_svg);
  int failed = 0;
  for (const auto& row : report.rows) failed += row.failed ? 1 : 0;
  std::printf("%6s %4s %6s %14s %14s %14s\n", "k", "L", "trials", "mean_mse", "std_mse", "pca_mse");
  for (const auto& a : report.aggregates)
    std::printf("%6d %4d %6d %14.6g %14.6g %14.6g\n", a.k, a.L, a.count, a.mean_final_mse,
                a.std_final_mse, a.mean_pca_mse);
  if (failed > 0) {
    std::fprintf(stderr, "warning: %d of %zu cells failed\n", failed, report.rows.size());
    for (const auto& row : report.rows)
      if (row.failed)
        std::fprintf(stderr, "  trial=%d k=%d L=%d: %s\n", row.trial, row.k, row.L,
                     row.error.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-filter dimensionality reduction"};
  app.require_subcommand(1);

  // bound
  std::int64_t bn = 0, bd = 0, bl = 0;
  auto* bound = app.add_subcommand("bound", "largest k whose stored model is smaller than the data");
  bound->add_option("--n", bn, "number of nodes")->required();
  bound->add_option("--d", bd, "signal dimension")->required();
  bound->add_option("--l", bl, "filter order")->required();

  // graph
  ConfigFlags graph_flags;
  int graph_trial = 0;
  std::string eig_out;
  auto* graph = app.add_subcommand("graph", "build the similarity graph and report its spectrum");
  graph_flags.attach(graph, true);
  graph->add_option("--trial", graph_trial, "subset index for labeled data");
  graph->add_option("--eigenvalues-out", eig_out, "write the eigenvalues as one CSV row");

  // fit
  ConfigFlags fit_flags;
  int fit_trial = 0, fit_k = 0, fit_l = 0;
  std::string model_out;
  auto* fitc = app.add_subcommand("fit", "fit graph filters and save a .gfm model");
  fit_flags.attach(fitc, true);
  fitc->add_option("--trial", fit_trial, "subset index for labeled data");
  fitc->add_option("--k", fit_k, "reduced dimension")->required();
  fitc->add_option("--l", fit_l, "filter order")->required();
  fitc->add_option("--model-out", model_out, "output model path")->required();

  // encode
  ConfigFlags enc_flags;
  int enc_trial = 0;
  std::string enc_model, enc_out;
  auto* encode = app.add_subcommand("encode", "compute codes for data on the model's graph");
  enc_flags.attach(encode, true);
  encode->add_option("--trial", enc_trial, "subset index for labeled data");
  encode->add_option("--model", enc_model, "model path")->required();
  encode->add_option("--out", enc_out, "output CSV of codes (k x n)")->required();

  // decode
  std::string dec_model, dec_codes, dec_out;
  auto* decode = app.add_subcommand("decode", "reconstruct signals from codes");
  decode->add_option("--model", dec_model, "model path")->required();
  decode->add_option("--codes", dec_codes, "codes CSV (defaults to the codes stored in the model)");
  decode->add_option("--out", dec_out, "output CSV (D x n)")->required();

  // eval
  ConfigFlags eval_flags;
  int eval_trial = 0;
  std::string eval_model;
  auto* eval = app.add_subcommand("eval", "report storage and reconstruction error of a model");
  eval_flags.attach(eval, true);
  eval->add_option("--trial", eval_trial, "subset index for labeled data");
  eval->add_option("--model", eval_model, "model path")->required();

  // sweep
  ConfigFlags sweep_flags;
  std::string out_csv, out_svg;
  bool serial = false;
  auto* sweep = app.add_subcommand("sweep", "run the (trial, k, L) experiment grid");
  sweep_flags.attach(sweep, false);
  sweep->add_option("--out-csv", out_csv, "per-cell results")->required();
  sweep->add_option("--out-svg", out_svg, "MSE versus k chart");
  sweep->add_flag("--serial", serial, "ignore GFRED_THREADS and run trials one at a time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*bound) return cmd_bound(bn, bd, bl);
    if (*graph) return cmd_graph(graph_flags, graph_trial, eig_out);
    if (*fitc) return cmd_fit(fit_flags, fit_trial, fit_k, fit_l, model_out);
    if (*encode) return cmd_encode(enc_flags, enc_trial, enc_model, enc_out);
    if (*decode) return cmd_decode(dec_model, dec_codes, dec_out);
    if (*eval) {
      const bool have_data = !eval_flags.values.at("dataset-path").empty() ||
                             !eval_flags.values.at("dataset-format").empty() ||
                             !eval_flags.config_path.empty();
      return cmd_eval(eval_flags, eval_trial, eval_model, have_data);
    }
    if (*sweep) return cmd_sweep(sweep_flags, out_csv, out_svg, serial);
  } catch (const Error& e) {
    std::cerr << "gfred: " << e.what() << "\n";
    if (is_config_error(e.code())) return kExitConfig;
    if (is_data_error(e.code())) return kExitData;
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "gfred: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
