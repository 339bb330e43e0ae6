#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gfred/graph.hpp"
#include "gfred/spectral.hpp"

namespace gfred {

/// Iterate of the block descent: reconstruction taps B_0..B_L and the
/// coefficient matrix G (k x n). The reducing filter is C = G Z', never stored.
struct Filters {
  TapStack B;
  Eigen::MatrixXd G;
};

struct FilterModel {
  int L = 0;
  int k = 0;
  TapStack B;
  Eigen::MatrixXd G;
  Eigen::VectorXd mean;
  std::uint64_t spectrum_fingerprint = 0;

  Filters filters() const { return {B, G}; }
};

struct FitOptions {
  std::optional<double> epsilon;  // default 1e-6 * (|B0|_F + |G0|_F)
  int max_iters = 500;
};

struct FitResult {
  FilterModel model;
  std::vector<double> objective_trace;  // initial value, then one entry per iteration
  std::vector<double> update_trace;     // initial value, then one entry per block update
  int iterations = 0;
  bool converged = false;
  double epsilon = 0.0;
};

/// Exact line-search result along X - c * direction. When the quadratic
/// coefficient vanishes the direction is degenerate and `c` is 0.
struct StepSize {
  double c = 0.0;
  bool degenerate = false;
  double linear_data = 0.0;   // gamma_1 / delta_1
  double linear_model = 0.0;  // gamma_2 / delta_2
  double quadratic = 0.0;     // gamma_3 / delta_3
};

/// Spectral-domain reduced data: column i is G * Kz(:,i).
Eigen::MatrixXd spectral_codes(const SpectralCache& cache, const Eigen::MatrixXd& G);

/// Column i is (sum_l lambda_i^l taps_l) * codes(:,i).
Eigen::MatrixXd apply_response(const SpectralCache& cache, const TapStack& taps,
                               const Eigen::MatrixXd& codes);
Eigen::MatrixXd apply_response(const Eigen::MatrixXd& lambda_pow, const TapStack& taps,
                               const Eigen::MatrixXd& codes);

/// n^-1 sum_i |x_i - B_i G Kz(:,i)|^2 in the graph spectral domain.
double objective(const SpectralCache& cache, const Filters& filters);

/// True gradient of `objective` with respect to each tap B_l.
TapStack grad_B(const SpectralCache& cache, const Filters& filters);

/// True gradient of `objective` with respect to G, evaluated at taps `B_current`.
Eigen::MatrixXd grad_G(const SpectralCache& cache, const TapStack& B_current,
                       const Eigen::MatrixXd& G);

StepSize step_size_B(const SpectralCache& cache, const Filters& filters, const TapStack& gradB);

StepSize step_size_G(const SpectralCache& cache, const TapStack& B_current,
                     const Eigen::MatrixXd& G, const Eigen::MatrixXd& gradG);

/// PCA start: B_0 = top-k principal basis, higher taps zero, and
/// G = U_k' Xtilde (Kz + mu I)^-1 with mu = 1e-10 tr(Kz) / n.
/// At L = 0 this is U_k' Xtilde (Xtilde'Xtilde + mu I)^-1; for L >= 1 the
/// codes G Kz reproduce the PCA scores, so the start has the PCA objective.
Filters init(const CenteredDataset& ds, const SpectralCache& cache, int k);

/// Lift a solution fitted at a lower order to `target.L`: extra taps are
/// zero and G is re-solved so the spectral codes are preserved.
Filters warm_start(const SpectralCache& target, const SpectralCache& source,
                   const Filters& solution);

/// Block gradient descent with exact line search from `start`.
/// Each iteration updates B, then computes the G gradient at the new B.
FitResult fit_from(const SpectralCache& cache, Filters start, const Eigen::VectorXd& mean,
                   std::uint64_t fingerprint, const FitOptions& opts);

FitResult fit(const CenteredDataset& ds, const GraphSpectrum& spectrum, int k, int L,
              const FitOptions& opts = {});

/// |grad_B|_F + |grad_G|_F at the model's iterate.
double stationarity_residual(const FilterModel& model, const SpectralCache& cache);

double frobenius_norm(const TapStack& taps);

}  // namespace gfred
