#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace gfred {

/// D x N data matrix with one optional label per column.
struct LabeledData {
  Eigen::MatrixXd X;
  std::vector<int> labels;
  int image_rows = 0;  // 0 when the data carry no image geometry
  int image_cols = 0;
};

/// Paired IDX files (images magic 0x00000803, labels 0x00000801).
/// Pixels are scaled to [0,1]; each image is flattened row-major into a column.
LabeledData load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

/// Rectangular numeric CSV, one column per data vector. With `label_row`
/// the first row holds integer labels.
LabeledData load_csv_matrix(const std::filesystem::path& path, bool label_row = false);

/// Writes values with 17 significant digits so load_csv_matrix reads them back exactly.
void write_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& M);

/// Deterministic 28x28 digit-like images: seven-segment glyphs of each class
/// with per-image jitter in position, slant, scale, stroke width and pixel noise.
LabeledData synthetic_digits(int classes, int per_class, std::uint64_t seed);

}  // namespace gfred
