#include "gfred/spectral.hpp"

#include <cmath>
#include <string>

#include "gfred/error.hpp"

namespace gfred {

CenteredDataset center(const Eigen::MatrixXd& X) {
  if (X.cols() < 1) throw Error(Errc::DimensionMismatch, "center needs at least one column");
  CenteredDataset ds;
  ds.mean = X.rowwise().sum() / static_cast<double>(X.cols());
  ds.Xbar = X.colwise() - ds.mean;
  return ds;
}

namespace {

void check_columns(const Eigen::MatrixXd& M, const GraphSpectrum& spectrum) {
  if (M.cols() != spectrum.U.rows())
    throw Error(Errc::DimensionMismatch, "data has " + std::to_string(M.cols()) +
                                             " columns, graph has " +
                                             std::to_string(spectrum.U.rows()) + " nodes");
}

}  // namespace

Eigen::MatrixXd gft(const Eigen::MatrixXd& Xbar, const GraphSpectrum& spectrum) {
  check_columns(Xbar, spectrum);
  return Xbar * spectrum.U;
}

Eigen::MatrixXd igft(const Eigen::MatrixXd& Xtilde, const GraphSpectrum& spectrum) {
  check_columns(Xtilde, spectrum);
  return Xtilde * spectrum.U.transpose();
}

Eigen::MatrixXd eigenvalue_powers(const Eigen::VectorXd& lambda, int L) {
  if (L < 0) throw Error(Errc::InvalidArgument, "filter order must be nonnegative");
  Eigen::MatrixXd pow(lambda.size(), L + 1);
  pow.col(0).setOnes();
  for (int l = 0; l < L; ++l) pow.col(l + 1) = pow.col(l).cwiseProduct(lambda);
  return pow;
}

SpectralCache build_cache(const Eigen::MatrixXd& Xbar, const GraphSpectrum& spectrum, int L) {
  SpectralCache cache;
  cache.L = L;
  cache.Xtilde = gft(Xbar, spectrum);
  cache.lambda = spectrum.lambda;
  cache.lambda_pow = eigenvalue_powers(spectrum.lambda, L);
  cache.overflow = (cache.lambda_pow.col(L).cwiseAbs().array() > 1e150).any();

  const Eigen::Index n = cache.n();
  const Eigen::MatrixXd gram = cache.Xtilde.transpose() * cache.Xtilde;
  cache.Kz.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      // Geometric series summed term by term so lambda_i lambda_j = 1 needs no special case.
      const double ratio = spectrum.lambda[i] * spectrum.lambda[j];
      double term = 1.0;
      double series = 1.0;
      for (int l = 1; l <= L; ++l) {
        term *= ratio;
        series += term;
      }
      const double v = gram(i, j) * series;
      cache.Kz(i, j) = v;
      cache.Kz(j, i) = v;
    }
  }
  cache.trace_sigma_x = cache.Xtilde.squaredNorm() / static_cast<double>(n);
  return cache;
}

Eigen::MatrixXd spectral_response(const TapStack& taps, const Eigen::RowVectorXd& lambda_pow_row) {
  if (taps.empty()) throw Error(Errc::InvalidArgument, "empty tap stack");
  if (lambda_pow_row.size() != static_cast<Eigen::Index>(taps.size()))
    throw Error(Errc::DimensionMismatch, "power row length must equal the number of taps");
  Eigen::MatrixXd out = taps[0] * lambda_pow_row[0];
  for (std::size_t l = 1; l < taps.size(); ++l)
    out += lambda_pow_row[static_cast<Eigen::Index>(l)] * taps[l];
  return out;
}

}  // namespace gfred
