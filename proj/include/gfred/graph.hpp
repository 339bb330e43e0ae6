#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace gfred {

enum class Kernel { Cosine, Gaussian };
enum class Symmetrization { Union, Mutual };

struct SimilarityConfig {
  Kernel kernel = Kernel::Cosine;
  double alpha = 0.01;  // Gaussian width, unused for cosine
  int knn = 12;
  Symmetrization symmetrization = Symmetrization::Union;
  bool normalize_spectrum = false;  // divide S by its largest |eigenvalue| after sparsification
};

/// Full eigendecomposition of a symmetric adjacency matrix.
///
/// Eigenvalues are sorted descending by algebraic value and column i of `U`
/// pairs with `lambda[i]`. Each eigenvector is sign-normalized so that its
/// largest-magnitude entry (lowest index on ties) is nonnegative.
struct GraphSpectrum {
  Eigen::MatrixXd S;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd U;

  Eigen::Index n() const { return S.rows(); }
};

/// Dense pairwise similarity between the columns of X, zero diagonal.
///
/// Cosine: x_i'x_j / (|x_i| |x_j|). Gaussian: exp(-0.5 alpha |x_i - x_j|^2).
/// Each pair is evaluated once and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd similarity_dense(const Eigen::MatrixXd& X, const SimilarityConfig& cfg);

/// Keep the `knn` strongest off-diagonal entries per row and symmetrize the mask.
///
/// Ties are broken by the lower column index. Union keeps (i,j) when either
/// endpoint marked it, Mutual only when both did.
Eigen::MatrixXd knn_sparsify(const Eigen::MatrixXd& S_full, const SimilarityConfig& cfg);

GraphSpectrum eigendecompose(const Eigen::MatrixXd& S);

/// similarity_dense -> knn_sparsify -> eigendecompose.
GraphSpectrum build_graph(const Eigen::MatrixXd& X, const SimilarityConfig& cfg);

/// Flip column signs so the largest-magnitude entry of each column is nonnegative.
void apply_sign_convention(Eigen::MatrixXd& vectors);

/// 64-bit FNV-1a over the raw bytes of lambda and U.
std::uint64_t spectrum_fingerprint(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& U);
std::uint64_t spectrum_fingerprint(const GraphSpectrum& spectrum);

}  // namespace gfred
