#include <doctest.h>

#include <cmath>
#include <random>

#include "gfred/error.hpp"
#include "gfred/graph.hpp"
#include "oracles.hpp"

using namespace gfred;

TEST_CASE("cosine similarity of identical and orthogonal columns") {
  Eigen::MatrixXd X(2, 3);
  X << 1, 1, 0,
       2, 2, 0.5;
  SimilarityConfig cfg;
  const Eigen::MatrixXd S = similarity_dense(X, cfg);
  CHECK(S(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(S.diagonal().isZero(0.0));

  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  CHECK(similarity_dense(I, cfg)(0, 1) == 0.0);
}

TEST_CASE("gaussian kernel value") {
  Eigen::MatrixXd X(2, 2);
  X << 0, 3,
       0, 4;
  SimilarityConfig cfg;
  cfg.kernel = Kernel::Gaussian;
  cfg.alpha = 0.01;
  // exp(-0.5 * 0.01 * 25) = exp(-0.125)
  CHECK(similarity_dense(X, cfg)(0, 1) == doctest::Approx(0.8824969025845955).epsilon(1e-15));
}

TEST_CASE("similarity errors") {
  SimilarityConfig cfg;
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(3, 3);
  X.col(1).setZero();
  CHECK_THROWS_AS(similarity_dense(X, cfg), Error);
  try {
    similarity_dense(X, cfg);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroColumn);
  }
  CHECK_THROWS_AS(similarity_dense(Eigen::MatrixXd::Ones(3, 1), cfg), Error);
  cfg.kernel = Kernel::Gaussian;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(similarity_dense(Eigen::MatrixXd::Ones(3, 3), cfg), Error);
}

TEST_CASE("similarity is exactly symmetric and bounded") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd X = oracle::random_matrix(rng, 4, 9);
    for (Kernel kernel : {Kernel::Cosine, Kernel::Gaussian}) {
      SimilarityConfig cfg;
      cfg.kernel = kernel;
      cfg.alpha = 0.3;
      const Eigen::MatrixXd S = similarity_dense(X, cfg);
      CHECK(S == S.transpose());
      for (Eigen::Index i = 0; i < 9; ++i)
        for (Eigen::Index j = 0; j < 9; ++j) {
          if (i == j) continue;
          if (kernel == Kernel::Cosine) {
            CHECK(std::abs(S(i, j)) <= 1.0);
          } else {
            CHECK(S(i, j) > 0.0);
            CHECK(S(i, j) <= 1.0);
          }
        }
    }
  }
}

TEST_CASE("knn keeps everything when knn = n-1") {
  Eigen::MatrixXd S(3, 3);
  S << 0, 0.2, 0.5,
       0.2, 0, 0.9,
       0.5, 0.9, 0;
  SimilarityConfig cfg;
  cfg.knn = 2;
  CHECK(knn_sparsify(S, cfg) == S);
}

TEST_CASE("knn on a star graph matches the literal rule") {
  Eigen::MatrixXd S(4, 4);
  S << 0.0, 0.9, 0.8, 0.7,
       0.9, 0.0, 0.1, 0.2,
       0.8, 0.1, 0.0, 0.3,
       0.7, 0.2, 0.3, 0.0;
  SimilarityConfig cfg;
  cfg.knn = 1;
  const Eigen::MatrixXd U = knn_sparsify(S, cfg);
  CHECK(U == oracle::knn_brute(S, 1, false));
  // Hub marks only node 1, but every spoke marks the hub.
  CHECK(U(0, 1) == 0.9);
  CHECK(U(0, 2) == 0.8);
  CHECK(U(0, 3) == 0.7);
  CHECK(U(1, 2) == 0.0);
  CHECK(U(2, 3) == 0.0);

  cfg.symmetrization = Symmetrization::Mutual;
  const Eigen::MatrixXd M = knn_sparsify(S, cfg);
  CHECK(M == oracle::knn_brute(S, 1, true));
  CHECK(M(0, 2) == 0.0);
  CHECK(M(0, 1) == 0.9);
}

TEST_CASE("knn ties go to the lower column index") {
  Eigen::MatrixXd S(4, 4);
  S << 0, 0.5, 0.5, 0.5,
       0.5, 0, 0.1, 0.1,
       0.5, 0.1, 0, 0.1,
       0.5, 0.1, 0.1, 0;
  SimilarityConfig cfg;
  cfg.knn = 1;
  cfg.symmetrization = Symmetrization::Mutual;
  const Eigen::MatrixXd M = knn_sparsify(S, cfg);
  CHECK(M(0, 1) == 0.5);
  CHECK(M(0, 2) == 0.0);
}

TEST_CASE("knn matches brute force on random similarity") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 8;
    const Eigen::MatrixXd S = similarity_dense(oracle::random_matrix(rng, 3, n), {});
    for (int knn = 1; knn < n; ++knn) {
      for (bool mutual : {false, true}) {
        SimilarityConfig cfg;
        cfg.knn = knn;
        cfg.symmetrization = mutual ? Symmetrization::Mutual : Symmetrization::Union;
        const Eigen::MatrixXd K = knn_sparsify(S, cfg);
        CHECK(K == oracle::knn_brute(S, knn, mutual));
        CHECK(K == K.transpose());
        const long nonzero = (K.array() != 0.0).count();
        CHECK(nonzero <= std::min<long>(2L * n * knn, static_cast<long>(n) * (n - 1)));
      }
    }
  }
}

TEST_CASE("knn errors and normalization") {
  SimilarityConfig cfg;
  cfg.knn = 3;
  CHECK_THROWS_AS(knn_sparsify(Eigen::MatrixXd::Zero(3, 3), cfg), Error);

  std::mt19937_64 rng(3);
  Eigen::MatrixXd X = oracle::random_matrix(rng, 4, 10).cwiseAbs();
  cfg.kernel = Kernel::Gaussian;
  cfg.alpha = 0.5;
  cfg.normalize_spectrum = true;
  const Eigen::MatrixXd S = knn_sparsify(similarity_dense(X, cfg), cfg);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues();
  CHECK(ev.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eigendecompose small cases") {
  const GraphSpectrum zero = eigendecompose(Eigen::MatrixXd::Zero(2, 2));
  CHECK(zero.lambda.isZero(0.0));
  // Repeated eigenvalue: any orthonormal basis is valid.
  CHECK((zero.U.transpose() * zero.U).isApprox(Eigen::MatrixXd::Identity(2, 2)));

  Eigen::MatrixXd S(2, 2);
  S << 0, 1,
       1, 0;
  const GraphSpectrum sp = eigendecompose(S);
  CHECK(sp.lambda[0] == doctest::Approx(1.0));
  CHECK(sp.lambda[1] == doctest::Approx(-1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(sp.U(0, 0) == doctest::Approx(r));
  CHECK(sp.U(1, 0) == doctest::Approx(r));
  // Equal magnitudes: the first entry decides the sign.
  CHECK(sp.U(0, 1) == doctest::Approx(r));
  CHECK(sp.U(1, 1) == doctest::Approx(-r));
}

TEST_CASE("eigendecompose invariants on random symmetric matrices") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + trial % 9;
    Eigen::MatrixXd A = oracle::random_matrix(rng, n, n);
    const Eigen::MatrixXd S = A + A.transpose();
    const GraphSpectrum sp = eigendecompose(S);

    CHECK((sp.U.transpose() * sp.U - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <=
          1e-10);
    CHECK((sp.U * sp.lambda.asDiagonal() * sp.U.transpose() - S).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(std::abs(sp.lambda.sum() - S.trace()) <= 1e-9 * n);
    for (int i = 0; i < n; ++i) {
      CHECK((S * sp.U.col(i) - sp.lambda[i] * sp.U.col(i)).norm() <=
            1e-8 * (1.0 + std::abs(sp.lambda[i])));
      if (i > 0) CHECK(sp.lambda[i - 1] >= sp.lambda[i]);
      Eigen::Index arg;
      sp.U.col(i).cwiseAbs().maxCoeff(&arg);
      CHECK(sp.U(arg, i) >= 0.0);
    }
  }
}

TEST_CASE("fingerprint changes with the spectrum") {
  Eigen::MatrixXd S(2, 2);
  S << 0, 1,
       1, 0;
  GraphSpectrum a = eigendecompose(S);
  GraphSpectrum b = a;
  CHECK(spectrum_fingerprint(a) == spectrum_fingerprint(b));
  b.U(0, 0) = -b.U(0, 0);
  CHECK(spectrum_fingerprint(a) != spectrum_fingerprint(b));
}
