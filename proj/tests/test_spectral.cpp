#include <doctest.h>

#include <cmath>
#include <random>

#include "gfred/error.hpp"
#include "gfred/spectral.hpp"
#include "oracles.hpp"

using namespace gfred;

TEST_CASE("center") {
  Eigen::MatrixXd X(1, 2);
  X << 1, 3;
  const CenteredDataset ds = center(X);
  CHECK(ds.mean[0] == 2.0);
  CHECK(ds.Xbar(0, 0) == -1.0);
  CHECK(ds.Xbar(0, 1) == 1.0);

  Eigen::MatrixXd same(3, 4);
  same.colwise() = Eigen::Vector3d(1.5, -2.0, 7.0);
  CHECK(center(same).Xbar.isZero(0.0));

  std::mt19937_64 rng(10);
  const CenteredDataset r = center(oracle::random_matrix(rng, 4, 7));
  CHECK(r.Xbar.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(center(Eigen::MatrixXd(2, 0)), Error);
}

TEST_CASE("gft and igft") {
  std::mt19937_64 rng(11);
  GraphSpectrum id;
  id.S = Eigen::MatrixXd::Zero(5, 5);
  id.lambda = Eigen::VectorXd::Zero(5);
  id.U = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd X = oracle::random_matrix(rng, 3, 5);
  CHECK(gft(X, id) == X);
  CHECK(igft(X, id) == X);

  Eigen::MatrixXd S(2, 2);
  S << 0, 1,
       1, 0;
  const GraphSpectrum sp = eigendecompose(S);
  Eigen::MatrixXd row(1, 2);
  row << 1, 0;
  const Eigen::MatrixXd t = gft(row, sp);
  CHECK(t(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(t(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 7;
    const GraphSpectrum g = eigendecompose(oracle::random_adjacency(rng, n));
    const Eigen::MatrixXd Xb = oracle::random_matrix(rng, 3, n);
    const Eigen::MatrixXd Xt = gft(Xb, g);
    CHECK(std::abs(Xt.norm() - Xb.norm()) <= 1e-12 * Xb.norm());
    CHECK(oracle::rel_err(igft(Xt, g), Xb) <= 1e-10);
  }

  CHECK_THROWS_AS(gft(Eigen::MatrixXd::Zero(2, 3), sp), Error);
  CHECK_THROWS_AS(igft(Eigen::MatrixXd::Zero(2, 3), sp), Error);
}

TEST_CASE("eigenvalue powers follow the recurrence") {
  Eigen::VectorXd lambda(4);
  lambda << 0.0, -1.5, 2.0, 0.3;
  const Eigen::MatrixXd P = eigenvalue_powers(lambda, 4);
  CHECK(P.col(0).isOnes(0.0));
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 4; ++i) CHECK(P(i, l + 1) == P(i, l) * lambda[i]);
}

TEST_CASE("build_cache at L = 0 is the Gram matrix") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd Xb = center(oracle::random_matrix(rng, 3, 6)).Xbar;
  const GraphSpectrum sp = eigendecompose(oracle::random_adjacency(rng, 6));
  const SpectralCache c = build_cache(Xb, sp, 0);
  const Eigen::MatrixXd Xt = gft(Xb, sp);
  CHECK(oracle::rel_err(c.Kz, Xt.transpose() * Xt) <= 1e-15);
  CHECK(c.trace_sigma_x == doctest::Approx(Xt.squaredNorm() / 6.0).epsilon(1e-14));
}

TEST_CASE("build_cache two-node series cancels") {
  // lambda = (1, -1), L = 1: Kz(0,1) = c * (1 + 1 * -1) = 0
  Eigen::MatrixXd S(2, 2);
  S << 0, 1,
       1, 0;
  const GraphSpectrum sp = eigendecompose(S);
  Eigen::MatrixXd Xb(2, 2);
  Xb << 1, 2,
        3, -1;
  const SpectralCache c = build_cache(Xb, sp, 1);
  CHECK(std::abs(c.Kz(0, 1)) <= 1e-13);
  CHECK(c.Kz(0, 1) == c.Kz(1, 0));
}

TEST_CASE("build_cache matches the stacked construction") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 7;
    const int D = 1 + (trial / 7) % 8;
    const int L = trial % 5;
    const Eigen::MatrixXd Xb = center(oracle::random_matrix(rng, D, n)).Xbar;
    const GraphSpectrum sp = eigendecompose(oracle::random_adjacency(rng, n));
    const SpectralCache c = build_cache(Xb, sp, L);
    const Eigen::MatrixXd Z = oracle::stacked_Z(gft(Xb, sp), sp.lambda, L);
    CHECK(oracle::rel_err(c.Kz, Z.transpose() * Z) <= 1e-10);
    CHECK(c.Kz == c.Kz.transpose());
    CHECK(c.lambda_pow.col(0).isOnes(0.0));
    CHECK_FALSE(c.overflow);
  }
}

TEST_CASE("build_cache flags overflowing powers") {
  GraphSpectrum sp;
  sp.lambda = Eigen::VectorXd::Constant(2, 1e40);
  sp.U = Eigen::MatrixXd::Identity(2, 2);
  sp.S = Eigen::MatrixXd::Zero(2, 2);
  CHECK(build_cache(Eigen::MatrixXd::Ones(1, 2), sp, 4).overflow);
  CHECK_FALSE(build_cache(Eigen::MatrixXd::Ones(1, 2), sp, 3).overflow);
}

TEST_CASE("spectral_response") {
  std::mt19937_64 rng(14);
  const TapStack one{oracle::random_matrix(rng, 3, 2)};
  Eigen::RowVectorXd p0(1);
  p0 << 1.0;
  CHECK(spectral_response(one, p0) == one[0]);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 2);
  Eigen::RowVectorXd p1(2);
  p1 << 1.0, 2.0;
  CHECK(spectral_response({I, I}, p1) == I * 3.0);

  const TapStack taps{oracle::random_matrix(rng, 3, 2), oracle::random_matrix(rng, 3, 2),
                      oracle::random_matrix(rng, 3, 2)};
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  CHECK(spectral_response(taps, eigenvalue_powers(zero, 2).row(0)) == taps[0]);
  CHECK_THROWS_AS(spectral_response(taps, p1), Error);
}
