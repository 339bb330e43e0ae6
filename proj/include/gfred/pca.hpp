#pragma once

#include <Eigen/Dense>

#include "gfred/spectral.hpp"

namespace gfred {

/// Top-k principal subspace of n^-1 Xbar Xbar' (normalized by n, not n-1).
struct PcaModel {
  int k = 0;
  Eigen::MatrixXd basis;        // D x k, orthonormal columns, eigenvalue-descending
  Eigen::VectorXd eigenvalues;  // top-k covariance eigenvalues
  Eigen::VectorXd mean;
  bool rank_deficient = false;  // k-th eigenvalue <= 1e-12 * largest
};

/// Uses the D x D covariance when D <= n and the n x n Gram matrix otherwise.
/// Columns follow the graph sign convention. Rank-deficient fits still return
/// a full orthonormal basis; missing directions are completed deterministically.
PcaModel pca_fit(const CenteredDataset& ds, int k);

/// n^-1 |Xbar - basis basis' Xbar|_F^2
double pca_mse(const CenteredDataset& ds, const PcaModel& model);

}  // namespace gfred
