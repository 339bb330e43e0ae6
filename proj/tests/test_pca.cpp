#include <doctest.h>

#include <random>

#include "gfred/error.hpp"
#include "gfred/pca.hpp"
#include "oracles.hpp"

using namespace gfred;

namespace {

// Column-by-column residual energy, the naive reading of the MSE.
double naive_mse(const Eigen::MatrixXd& Xbar, const Eigen::MatrixXd& basis) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < Xbar.cols(); ++i) {
    Eigen::VectorXd r = Xbar.col(i);
    for (Eigen::Index c = 0; c < basis.cols(); ++c) r -= basis.col(c).dot(Xbar.col(i)) * basis.col(c);
    total += r.squaredNorm();
  }
  return total / static_cast<double>(Xbar.cols());
}

}  // namespace

TEST_CASE("rank-one data is reconstructed exactly") {
  Eigen::VectorXd dir(4);
  dir << 1, -2, 0.5, 3;
  Eigen::RowVectorXd coef(6);
  coef << 1, 2, -1, 0.5, 4, -3;
  const CenteredDataset ds = center(dir * coef);
  const PcaModel m = pca_fit(ds, 1);
  CHECK(std::abs(m.basis.col(0).dot(dir.normalized())) == doctest::Approx(1.0));
  CHECK(pca_mse(ds, m) <= 1e-20);
}

TEST_CASE("one-dimensional data with full basis") {
  Eigen::MatrixXd X(1, 2);
  X << -1, 1;
  const CenteredDataset ds = center(X);
  CHECK(pca_mse(ds, pca_fit(ds, 1)) == 0.0);
}

TEST_CASE("full basis gives zero MSE") {
  std::mt19937_64 rng(20);
  const CenteredDataset ds = center(oracle::random_matrix(rng, 5, 9));
  CHECK(pca_mse(ds, pca_fit(ds, 5)) <= 1e-10);
}

TEST_CASE("MSE equals the discarded covariance eigenvalues") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const CenteredDataset ds = center(oracle::random_matrix(rng, 5, 20));
    const PcaModel m = pca_fit(ds, 2);
    // Independent route: singular values of Xbar / sqrt(n).
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(ds.Xbar / std::sqrt(20.0)).singularValues();
    const double discarded = sv.tail(3).squaredNorm();
    CHECK(oracle::rel_err(pca_mse(ds, m), discarded) <= 1e-9);
    CHECK(oracle::rel_err(naive_mse(ds.Xbar, m.basis), discarded) <= 1e-9);
    CHECK(m.eigenvalues[0] == doctest::Approx(sv[0] * sv[0]).epsilon(1e-10));
  }
}

TEST_CASE("pca_mse agrees with the per-column residual") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const CenteredDataset ds = center(oracle::random_matrix(rng, 6, 8));
    const PcaModel m = pca_fit(ds, 1 + trial % 5);
    CHECK(oracle::rel_err(pca_mse(ds, m), naive_mse(ds.Xbar, m.basis)) <= 1e-12);
  }
}

TEST_CASE("properties: orthonormal basis, projector identity, monotone in k") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int D = 2 + trial % 5;
    const int n = 3 + trial % 6;
    const CenteredDataset ds = center(oracle::random_matrix(rng, D, n));
    double previous = 1e300;
    for (int k = 1; k <= std::min(D, n); ++k) {
      const PcaModel m = pca_fit(ds, k);
      CHECK((m.basis.transpose() * m.basis - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10);
      const Eigen::MatrixXd residual = ds.Xbar - m.basis * (m.basis.transpose() * ds.Xbar);
      CHECK((m.basis.transpose() * residual).cwiseAbs().maxCoeff() <= 1e-10);
      const double mse = pca_mse(ds, m);
      CHECK(mse <= previous + 1e-12);
      previous = mse;
    }
  }
}

TEST_CASE("Gram route matches the covariance route") {
  std::mt19937_64 rng(24);
  const Eigen::MatrixXd X = oracle::random_matrix(rng, 30, 8);
  const CenteredDataset ds = center(X);
  const PcaModel wide = pca_fit(ds, 3);  // D > n: Gram path
  // Covariance route on the same subspace via a direct SVD.
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(ds.Xbar, Eigen::ComputeThinU);
  for (int c = 0; c < 3; ++c)
    CHECK(std::abs(wide.basis.col(c).dot(svd.matrixU().col(c))) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rank deficiency is reported and the basis completed") {
  // Centered data with n = 4 columns has rank <= 3.
  std::mt19937_64 rng(25);
  const CenteredDataset ds = center(oracle::random_matrix(rng, 10, 4));
  const PcaModel m = pca_fit(ds, 4);
  CHECK(m.rank_deficient);
  CHECK((m.basis.transpose() * m.basis - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(pca_mse(ds, m) <= 1e-20);
  CHECK_FALSE(pca_fit(ds, 3).rank_deficient);
}

TEST_CASE("pca errors") {
  std::mt19937_64 rng(26);
  const CenteredDataset ds = center(oracle::random_matrix(rng, 3, 5));
  CHECK_THROWS_AS(pca_fit(ds, 0), Error);
  CHECK_THROWS_AS(pca_fit(ds, 4), Error);
  const CenteredDataset other = center(oracle::random_matrix(rng, 4, 5));
  CHECK_THROWS_AS(pca_mse(other, pca_fit(ds, 2)), Error);
}
