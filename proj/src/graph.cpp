#include "gfred/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include "gfred/error.hpp"

namespace gfred {

Eigen::MatrixXd similarity_dense(const Eigen::MatrixXd& X, const SimilarityConfig& cfg) {
  const Eigen::Index n = X.cols();
  if (n < 2) throw Error(Errc::DimensionMismatch, "similarity needs at least two columns");
  if (cfg.kernel == Kernel::Gaussian && !(cfg.alpha > 0.0))
    throw Error(Errc::InvalidArgument, "Gaussian kernel requires alpha > 0");

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  if (cfg.kernel == Kernel::Cosine) {
    Eigen::VectorXd norms = X.colwise().norm().transpose();
    for (Eigen::Index i = 0; i < n; ++i)
      if (norms[i] == 0.0)
        throw Error(Errc::ZeroColumn, "column " + std::to_string(i) + " is the zero vector");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        double s = X.col(i).dot(X.col(j)) / (norms[i] * norms[j]);
        s = std::clamp(s, -1.0, 1.0);
        S(i, j) = s;
        S(j, i) = s;
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d2 = (X.col(i) - X.col(j)).squaredNorm();
        const double s = std::exp(-0.5 * cfg.alpha * d2);
        S(i, j) = s;
        S(j, i) = s;
      }
    }
  }
  return S;
}

Eigen::MatrixXd knn_sparsify(const Eigen::MatrixXd& S_full, const SimilarityConfig& cfg) {
  const Eigen::Index n = S_full.rows();
  if (S_full.cols() != n) throw Error(Errc::DimensionMismatch, "adjacency must be square");
  if (cfg.knn < 1) throw Error(Errc::InvalidArgument, "knn must be positive");
  if (cfg.knn > n - 1)
    throw Error(Errc::KnnTooLarge,
                "knn=" + std::to_string(cfg.knn) + " exceeds n-1=" + std::to_string(n - 1));

  std::vector<std::vector<char>> marked(n, std::vector<char>(n, 0));
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + cfg.knn, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        if (S_full(i, a) != S_full(i, b)) return S_full(i, a) > S_full(i, b);
                        return a < b;
                      });
    for (int t = 0; t < cfg.knn; ++t) marked[i][order[t]] = 1;
  }

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool keep = cfg.symmetrization == Symmetrization::Union
                            ? (marked[i][j] || marked[j][i])
                            : (marked[i][j] && marked[j][i]);
      if (keep) {
        S(i, j) = S_full(i, j);
        S(j, i) = S_full(i, j);
      }
    }
  }

  if (cfg.normalize_spectrum) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw Error(Errc::ConvergenceFailure, "eigenvalue solver failed during normalization");
    const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (scale > 0.0) S /= scale;
  }
  return S;
}

void apply_sign_convention(Eigen::MatrixXd& vectors) {
  // Magnitudes within 1e-12 relative of the column maximum count as ties.
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double peak = vectors.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) >= peak * (1.0 - 1e-12)) {
        if (vectors(r, c) < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

GraphSpectrum eigendecompose(const Eigen::MatrixXd& S) {
  const Eigen::Index n = S.rows();
  if (S.cols() != n) throw Error(Errc::DimensionMismatch, "adjacency must be square");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::ConvergenceFailure, "symmetric eigensolver did not converge");

  // Eigen returns ascending eigenvalues; reverse to descending.
  GraphSpectrum out;
  out.S = S;
  out.lambda = solver.eigenvalues().reverse();
  out.U = solver.eigenvectors().rowwise().reverse();
  apply_sign_convention(out.U);
  return out;
}

GraphSpectrum build_graph(const Eigen::MatrixXd& X, const SimilarityConfig& cfg) {
  return eigendecompose(knn_sparsify(similarity_dense(X, cfg), cfg));
}

namespace {

void fnv1a(std::uint64_t& h, const double* data, std::size_t count) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t b = 0; b < count * sizeof(double); ++b) {
    h ^= bytes[b];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t spectrum_fingerprint(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& U) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv1a(h, lambda.data(), static_cast<std::size_t>(lambda.size()));
  fnv1a(h, U.data(), static_cast<std::size_t>(U.size()));
  return h;
}

std::uint64_t spectrum_fingerprint(const GraphSpectrum& spectrum) {
  return spectrum_fingerprint(spectrum.lambda, spectrum.U);
}

}  // namespace gfred
