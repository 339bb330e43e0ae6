#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gfred/graph.hpp"

namespace gfred {

/// Per-node reconstruction taps B_0..B_L (each D x k), or reducing taps C_0..C_L (each k x D).
using TapStack = std::vector<Eigen::MatrixXd>;

struct CenteredDataset {
  Eigen::MatrixXd Xbar;  // D x n, column i = x_i - mean
  Eigen::VectorXd mean;  // length D

  Eigen::Index D() const { return Xbar.rows(); }
  Eigen::Index n() const { return Xbar.cols(); }
};

/// Everything the optimizer needs from the data and the graph, for one filter order.
///
/// Kz(i,j) = z_i' z_j where z_i stacks (x_i, lambda_i x_i, ..., lambda_i^L x_i)
/// for the GFT columns x_i. The stacked vectors are never formed.
struct SpectralCache {
  Eigen::MatrixXd Xtilde;      // D x n
  Eigen::VectorXd lambda;      // length n
  Eigen::MatrixXd lambda_pow;  // n x (L+1), entry (i,l) = lambda_i^l
  Eigen::MatrixXd Kz;          // n x n, exactly symmetric
  double trace_sigma_x = 0.0;  // n^-1 |Xtilde|_F^2
  int L = 0;
  bool overflow = false;  // some |lambda_i|^L exceeded 1e150

  Eigen::Index D() const { return Xtilde.rows(); }
  Eigen::Index n() const { return Xtilde.cols(); }
};

CenteredDataset center(const Eigen::MatrixXd& X);

/// Graph Fourier transform of the node signals: Xtilde = Xbar * U.
Eigen::MatrixXd gft(const Eigen::MatrixXd& Xbar, const GraphSpectrum& spectrum);

/// Inverse transform: Xbar = Xtilde * U'.
Eigen::MatrixXd igft(const Eigen::MatrixXd& Xtilde, const GraphSpectrum& spectrum);

/// Power table with lambda_pow(i,l+1) = lambda_pow(i,l) * lambda_i and 0^0 = 1.
Eigen::MatrixXd eigenvalue_powers(const Eigen::VectorXd& lambda, int L);

SpectralCache build_cache(const Eigen::MatrixXd& Xbar, const GraphSpectrum& spectrum, int L);

/// Sum_l lambda_i^l B_l, the reconstruction filter's response at one graph frequency.
Eigen::MatrixXd spectral_response(const TapStack& taps, const Eigen::RowVectorXd& lambda_pow_row);

}  // namespace gfred
