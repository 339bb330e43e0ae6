#include "gfred/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gfred/error.hpp"
#include "gfred/graph.hpp"

namespace gfred {

namespace {

// Two passes of modified Gram-Schmidt. Columns whose residual vanishes are
// replaced by the first canonical vector that is not yet spanned.
void orthonormalize(Eigen::MatrixXd& Q, const Eigen::VectorXd& weights, double tol) {
  const Eigen::Index D = Q.rows();
  Eigen::Index next_canonical = 0;
  for (Eigen::Index c = 0; c < Q.cols(); ++c) {
    bool ok = weights[c] > tol;
    if (ok) {
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index p = 0; p < c; ++p) Q.col(c) -= Q.col(p).dot(Q.col(c)) * Q.col(p);
      const double norm = Q.col(c).norm();
      ok = norm > 1e-8;
      if (ok) Q.col(c) /= norm;
    }
    while (!ok) {
      if (next_canonical >= D) throw Error(Errc::InvalidArgument, "cannot complete basis");
      Q.col(c).setZero();
      Q(next_canonical++, c) = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index p = 0; p < c; ++p) Q.col(c) -= Q.col(p).dot(Q.col(c)) * Q.col(p);
      const double norm = Q.col(c).norm();
      ok = norm > 1e-8;
      if (ok) Q.col(c) /= norm;
    }
  }
}

}  // namespace

PcaModel pca_fit(const CenteredDataset& ds, int k) {
  const Eigen::Index D = ds.D();
  const Eigen::Index n = ds.n();
  if (k < 1 || k > std::min(D, n))
    throw Error(Errc::InvalidArgument, "k=" + std::to_string(k) + " outside [1, min(D,n)=" +
                                           std::to_string(std::min(D, n)) + "]");
  const double inv_n = 1.0 / static_cast<double>(n);

  PcaModel model;
  model.k = k;
  model.mean = ds.mean;
  model.eigenvalues.resize(k);
  model.basis.resize(D, k);

  if (D <= n) {
    const Eigen::MatrixXd cov = inv_n * (ds.Xbar * ds.Xbar.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
      throw Error(Errc::ConvergenceFailure, "covariance eigensolver failed");
    for (int j = 0; j < k; ++j) {
      model.eigenvalues[j] = std::max(solver.eigenvalues()[D - 1 - j], 0.0);
      model.basis.col(j) = solver.eigenvectors().col(D - 1 - j);
    }
  } else {
    // Same nonzero spectrum through the n x n Gram matrix; u_j = Xbar v_j / |Xbar v_j|.
    const Eigen::MatrixXd gram = inv_n * (ds.Xbar.transpose() * ds.Xbar);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
      throw Error(Errc::ConvergenceFailure, "Gram eigensolver failed");
    for (int j = 0; j < k; ++j) {
      model.eigenvalues[j] = std::max(solver.eigenvalues()[n - 1 - j], 0.0);
      model.basis.col(j) = ds.Xbar * solver.eigenvectors().col(n - 1 - j);
    }
  }

  const double largest = model.eigenvalues[0];
  const double tol = 1e-12 * largest;
  model.rank_deficient = !(model.eigenvalues[k - 1] > tol);
  orthonormalize(model.basis, model.eigenvalues, largest > 0.0 ? tol : -1.0);
  apply_sign_convention(model.basis);
  return model;
}

double pca_mse(const CenteredDataset& ds, const PcaModel& model) {
  if (model.basis.rows() != ds.D())
    throw Error(Errc::DimensionMismatch, "PCA basis dimension differs from data dimension");
  const Eigen::MatrixXd residual =
      ds.Xbar - model.basis * (model.basis.transpose() * ds.Xbar);
  return residual.squaredNorm() / static_cast<double>(ds.n());
}

}  // namespace gfred
