#pragma once

#include <cstdint>
#include <filesystem>

#include <Eigen/Dense>

#include "gfred/graph.hpp"
#include "gfred/optimizer.hpp"
#include "gfred/spectral.hpp"

namespace gfred {

enum class Domain { Vertex, Spectral };

struct ReducedData {
  Eigen::MatrixXd Y;  // k x n, column i is the code of node i
  Domain domain = Domain::Vertex;
};

/// Scalar counts for storing the graph codec versus raw data and PCA.
struct StorageBudget {
  std::int64_t n = 0, D = 0, k = 0, L = 0;
  std::int64_t stored_scalars = 0;  // k(L+1)D + 2kn + n(n+1)/2
  std::int64_t raw_scalars = 0;     // nD
  std::int64_t pca_scalars = 0;     // kD + kn

  static StorageBudget compute(std::int64_t n, std::int64_t D, std::int64_t k, std::int64_t L);
  bool compresses() const { return stored_scalars < raw_scalars; }
};

/// Closed form n[D - (n+1)/2] / (2n + (L+1)D).
double compression_bound_value(std::int64_t n, std::int64_t D, std::int64_t L);

/// Largest k whose stored scalar count is strictly below nD, computed in
/// integers. Equals the floor of compression_bound_value except when that
/// value is itself an integer (equal storage is not a reduction).
std::int64_t compression_bound(std::int64_t n, std::int64_t D, std::int64_t L);

ReducedData to_spectral(const ReducedData& reduced, const GraphSpectrum& spectrum);
ReducedData to_vertex(const ReducedData& reduced, const GraphSpectrum& spectrum);

/// Vertex-domain codes computed through the spectral fast path.
ReducedData reduce(const FilterModel& model, const CenteredDataset& ds,
                   const GraphSpectrum& spectrum, const SpectralCache& cache);

/// Reconstruction with the mean added back (D x n). Needs only the model,
/// the spectrum and the codes.
Eigen::MatrixXd reconstruct(const FilterModel& model, const ReducedData& reduced,
                            const GraphSpectrum& spectrum);

/// n^-1 |Xbar - (Xhat - mean)|_F^2 after reduce and reconstruct.
double reconstruction_mse(const FilterModel& model, const CenteredDataset& ds,
                          const GraphSpectrum& spectrum, const SpectralCache& cache);

/// Reducing taps C_l = G Lambda^l Xtilde' (each k x D), i.e. the blocks of C = G Z'.
TapStack reducing_taps(const Eigen::MatrixXd& G, const SpectralCache& cache);

/// Dense Kronecker evaluation of sum_l (S^l (x) I_k)(I_n (x) C_l) vec(Xbar).
/// Cost O(n^2 k D) memory; small instances only.
Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& S, const TapStack& C,
                            const Eigen::MatrixXd& Xbar);

/// Dense Kronecker evaluation of sum_m (S^m (x) I_D)(I_n (x) B_m) vec(Y).
Eigen::MatrixXd kron_reconstruct(const Eigen::MatrixXd& S, const TapStack& B,
                                 const Eigen::MatrixXd& Y);

struct StoredModel {
  FilterModel model;
  GraphSpectrum spectrum;  // S rebuilt as U diag(lambda) U'
  Eigen::MatrixXd Y;
  StorageBudget budget;
};

/// `.gfm` layout: "GFM1", u32 little-endian header length, JSON header
/// {version, n, D, k, L, stored_scalars, checksum}, then little-endian f64
/// payload in column-major order: mean, lambda, U, B_0..B_L, G, Y.
/// `checksum` is the CRC-32 of the payload bytes.
void save_model(const std::filesystem::path& path, const FilterModel& model,
                const GraphSpectrum& spectrum, const Eigen::MatrixXd& Y);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace gfred
