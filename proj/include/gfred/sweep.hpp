#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfred/dataset.hpp"
#include "gfred/graph.hpp"

namespace gfred {

enum class DatasetFormat { Idx, CsvMatrix, Synthetic };

struct ExperimentConfig {
  std::filesystem::path dataset_path;  // IDX images or CSV matrix
  std::filesystem::path labels_path;   // IDX labels
  DatasetFormat dataset_format = DatasetFormat::Synthetic;
  bool csv_label_row = false;
  int synthetic_pool = 50;  // synthetic images generated per class

  int classes_to_pick = 4;
  int images_per_class = 35;
  int trials = 1;
  std::uint64_t seed = 1;
  SimilarityConfig similarity;
  std::vector<int> k_list = {5};
  std::vector<int> L_list = {0, 1};
  std::optional<double> epsilon;
  int max_iters = 500;
  bool warm_start = true;        // also start order L from the next lower order's solution
  bool record_wall_time = true;  // false writes 0 so CSV output is byte-reproducible
};

/// Flat `key = value` lines; `#` starts a comment. Keys are the kebab-case
/// field names (dataset-path, k-list, max-iters, ...). Unknown keys are errors.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct SweepRow {
  int trial = 0;
  int k = 0;
  int L = 0;
  int iterations = 0;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  double pca_mse = 0.0;
  double wall_time_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepAggregate {
  int k = 0;
  int L = 0;
  int count = 0;
  double mean_final_mse = 0.0;
  double std_final_mse = 0.0;  // sample standard deviation, 0 for a single trial
  double mean_pca_mse = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // ordered by (trial, k, L)
  std::vector<SweepAggregate> aggregates;  // ordered by (k, L), failed rows excluded
};

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows);

LabeledData load_dataset(const ExperimentConfig& cfg);

/// `threads` <= 1 runs serially. Trials are independent; rows are merged by key.
SweepReport run_sweep(const ExperimentConfig& cfg, const LabeledData& data, int threads = 1);
SweepReport run_sweep(const ExperimentConfig& cfg, int threads = 1);

/// GFRED_THREADS, or 1 when unset or invalid.
int threads_from_env();

}  // namespace gfred
