#include "gfred/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gfred/error.hpp"
#include "gfred/pca.hpp"

namespace gfred {

namespace {

struct Evaluation {
  Eigen::MatrixXd codes;     // k x n
  Eigen::MatrixXd recon;     // D x n
  Eigen::MatrixXd residual;  // D x n
  double value = 0.0;
};

Evaluation evaluate(const SpectralCache& cache, const Filters& f) {
  Evaluation e;
  e.codes = spectral_codes(cache, f.G);
  e.recon = apply_response(cache, f.B, e.codes);
  e.residual = cache.Xtilde - e.recon;
  e.value = e.residual.squaredNorm() / static_cast<double>(cache.n());
  return e;
}

// Column i is (sum_l lambda_i^l taps_l)' * M(:,i).
Eigen::MatrixXd apply_response_adjoint(const SpectralCache& cache, const TapStack& taps,
                                       const Eigen::MatrixXd& M) {
  Eigen::MatrixXd out = taps[0].transpose() * (M * cache.lambda_pow.col(0).asDiagonal());
  for (std::size_t l = 1; l < taps.size(); ++l)
    out += taps[l].transpose() *
           (M * cache.lambda_pow.col(static_cast<Eigen::Index>(l)).asDiagonal());
  return out;
}

TapStack grad_B_from(const SpectralCache& cache, const Evaluation& e) {
  const double scale = -2.0 / static_cast<double>(cache.n());
  TapStack grad(static_cast<std::size_t>(cache.L + 1));
  for (int l = 0; l <= cache.L; ++l)
    grad[l] = scale * (e.residual * cache.lambda_pow.col(l).asDiagonal()) * e.codes.transpose();
  return grad;
}

Eigen::MatrixXd grad_G_from(const SpectralCache& cache, const TapStack& B, const Evaluation& e) {
  const double scale = -2.0 / static_cast<double>(cache.n());
  return scale * apply_response_adjoint(cache, B, e.residual) * cache.Kz;
}

StepSize finish_step(double lin_data, double lin_model, double quad) {
  StepSize s;
  s.linear_data = lin_data;
  s.linear_model = lin_model;
  s.quadratic = quad;
  s.degenerate = !(quad > 1e-300);
  s.c = s.degenerate ? 0.0 : (lin_model - lin_data) / quad;
  return s;
}

StepSize step_B_from(const SpectralCache& cache, const Evaluation& e, const TapStack& gradB) {
  const double inv_n = 1.0 / static_cast<double>(cache.n());
  const Eigen::MatrixXd H = apply_response(cache, gradB, e.codes);
  return finish_step(inv_n * (cache.Xtilde.cwiseProduct(H)).sum(),
                     inv_n * (e.recon.cwiseProduct(H)).sum(), inv_n * H.squaredNorm());
}

StepSize step_G_from(const SpectralCache& cache, const TapStack& B, const Evaluation& e,
                     const Eigen::MatrixXd& gradG) {
  const double inv_n = 1.0 / static_cast<double>(cache.n());
  const Eigen::MatrixXd M = apply_response(cache, B, spectral_codes(cache, gradG));
  return finish_step(inv_n * (cache.Xtilde.cwiseProduct(M)).sum(),
                     inv_n * (e.recon.cwiseProduct(M)).sum(), inv_n * M.squaredNorm());
}

void check_filters(const SpectralCache& cache, const Filters& f) {
  if (f.B.size() != static_cast<std::size_t>(cache.L + 1))
    throw Error(Errc::DimensionMismatch, "tap stack length must be L+1");
  const Eigen::Index k = f.G.rows();
  if (f.G.cols() != cache.n())
    throw Error(Errc::DimensionMismatch, "G must have n columns");
  for (const auto& tap : f.B)
    if (tap.rows() != cache.D() || tap.cols() != k)
      throw Error(Errc::DimensionMismatch, "every tap must be D x k");
}

// Solve G (Kz + mu I) = target through the eigendecomposition of Kz.
Eigen::MatrixXd ridge_solve(const Eigen::MatrixXd& Kz, const Eigen::MatrixXd& target) {
  const Eigen::Index n = Kz.rows();
  const double mu = 1e-10 * Kz.trace() / static_cast<double>(n);
  if (!(mu > 0.0)) return Eigen::MatrixXd::Zero(target.rows(), n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Kz);
  if (solver.info() != Eigen::Success)
    throw Error(Errc::ConvergenceFailure, "kernel eigensolver failed during initialization");
  const Eigen::VectorXd inv =
      (solver.eigenvalues().array().max(0.0) + mu).inverse().matrix();
  const Eigen::MatrixXd& Q = solver.eigenvectors();
  return ((target * Q) * inv.asDiagonal()) * Q.transpose();
}

bool all_finite(const TapStack& taps) {
  return std::all_of(taps.begin(), taps.end(), [](const auto& t) { return t.allFinite(); });
}

}  // namespace

double frobenius_norm(const TapStack& taps) {
  double s = 0.0;
  for (const auto& t : taps) s += t.squaredNorm();
  return std::sqrt(s);
}

Eigen::MatrixXd spectral_codes(const SpectralCache& cache, const Eigen::MatrixXd& G) {
  return G * cache.Kz;
}

Eigen::MatrixXd apply_response(const Eigen::MatrixXd& lambda_pow, const TapStack& taps,
                               const Eigen::MatrixXd& codes) {
  Eigen::MatrixXd out = taps[0] * (codes * lambda_pow.col(0).asDiagonal());
  for (std::size_t l = 1; l < taps.size(); ++l)
    out += taps[l] * (codes * lambda_pow.col(static_cast<Eigen::Index>(l)).asDiagonal());
  return out;
}

Eigen::MatrixXd apply_response(const SpectralCache& cache, const TapStack& taps,
                               const Eigen::MatrixXd& codes) {
  return apply_response(cache.lambda_pow, taps, codes);
}

double objective(const SpectralCache& cache, const Filters& filters) {
  check_filters(cache, filters);
  return evaluate(cache, filters).value;
}

TapStack grad_B(const SpectralCache& cache, const Filters& filters) {
  check_filters(cache, filters);
  return grad_B_from(cache, evaluate(cache, filters));
}

Eigen::MatrixXd grad_G(const SpectralCache& cache, const TapStack& B_current,
                       const Eigen::MatrixXd& G) {
  const Filters f{B_current, G};
  check_filters(cache, f);
  return grad_G_from(cache, B_current, evaluate(cache, f));
}

StepSize step_size_B(const SpectralCache& cache, const Filters& filters, const TapStack& gradB) {
  check_filters(cache, filters);
  return step_B_from(cache, evaluate(cache, filters), gradB);
}

StepSize step_size_G(const SpectralCache& cache, const TapStack& B_current,
                     const Eigen::MatrixXd& G, const Eigen::MatrixXd& gradG) {
  const Filters f{B_current, G};
  check_filters(cache, f);
  return step_G_from(cache, B_current, evaluate(cache, f), gradG);
}

Filters init(const CenteredDataset& ds, const SpectralCache& cache, int k) {
  if (ds.n() != cache.n() || ds.D() != cache.D())
    throw Error(Errc::DimensionMismatch, "dataset and spectral cache disagree");
  const PcaModel pca = pca_fit(ds, k);

  Filters f;
  f.B.assign(static_cast<std::size_t>(cache.L + 1), Eigen::MatrixXd::Zero(ds.D(), k));
  f.B[0] = pca.basis;
  f.G = ridge_solve(cache.Kz, pca.basis.transpose() * cache.Xtilde);
  return f;
}

Filters warm_start(const SpectralCache& target, const SpectralCache& source,
                   const Filters& solution) {
  if (target.L < source.L)
    throw Error(Errc::InvalidArgument, "warm start can only raise the filter order");
  if (target.n() != source.n() || target.D() != source.D())
    throw Error(Errc::DimensionMismatch, "warm start caches disagree on dimensions");
  check_filters(source, solution);

  Filters f;
  f.B = solution.B;
  f.B.resize(static_cast<std::size_t>(target.L + 1),
             Eigen::MatrixXd::Zero(target.D(), solution.G.rows()));
  f.G = ridge_solve(target.Kz, spectral_codes(source, solution.G));
  return f;
}

FitResult fit_from(const SpectralCache& cache, Filters start, const Eigen::VectorXd& mean,
                   std::uint64_t fingerprint, const FitOptions& opts) {
  check_filters(cache, start);
  if (opts.max_iters < 0) throw Error(Errc::InvalidArgument, "max_iters must be >= 0");
  if (opts.epsilon && !(*opts.epsilon > 0.0))
    throw Error(Errc::InvalidArgument, "epsilon must be positive");

  FitResult result;
  result.epsilon = opts.epsilon.value_or(1e-6 * (frobenius_norm(start.B) + start.G.norm()));
  result.epsilon = std::max(result.epsilon, std::numeric_limits<double>::min());

  Filters cur = std::move(start);
  Evaluation eval = evaluate(cache, cur);
  if (!std::isfinite(eval.value))
    throw Error(Errc::NonFiniteValue, "objective at the starting point is not finite");
  result.objective_trace.push_back(eval.value);
  result.update_trace.push_back(eval.value);

  for (int it = 0; it < opts.max_iters; ++it) {
    // B block.
    double moved_B = 0.0;
    const TapStack gB = grad_B_from(cache, eval);
    if (!all_finite(gB))
      throw Error(Errc::NonFiniteValue, "B gradient at iteration " + std::to_string(it));
    const StepSize sB = step_B_from(cache, eval, gB);
    if (!sB.degenerate && std::isfinite(sB.c) && sB.c > 0.0) {
      Filters trial{cur.B, cur.G};
      for (std::size_t l = 0; l < trial.B.size(); ++l) trial.B[l] -= sB.c * gB[l];
      Evaluation next = evaluate(cache, trial);
      // A rounding-level increase means the ray is numerically flat: treat as step 0.
      if (std::isfinite(next.value) && next.value <= eval.value) {
        moved_B = sB.c * frobenius_norm(gB);
        cur = std::move(trial);
        eval = std::move(next);
      }
    }
    result.update_trace.push_back(eval.value);

    // G block at the updated taps.
    double moved_G = 0.0;
    const Eigen::MatrixXd gG = grad_G_from(cache, cur.B, eval);
    if (!gG.allFinite())
      throw Error(Errc::NonFiniteValue, "G gradient at iteration " + std::to_string(it));
    const StepSize sG = step_G_from(cache, cur.B, eval, gG);
    if (!sG.degenerate && std::isfinite(sG.c) && sG.c > 0.0) {
      Filters trial{cur.B, cur.G - sG.c * gG};
      Evaluation next = evaluate(cache, trial);
      if (std::isfinite(next.value) && next.value <= eval.value) {
        moved_G = sG.c * gG.norm();
        cur = std::move(trial);
        eval = std::move(next);
      }
    }
    result.update_trace.push_back(eval.value);
    result.objective_trace.push_back(eval.value);
    result.iterations = it + 1;

    if (moved_B + moved_G < result.epsilon) {
      result.converged = true;
      break;
    }
  }

  result.model.L = cache.L;
  result.model.k = static_cast<int>(cur.G.rows());
  result.model.B = std::move(cur.B);
  result.model.G = std::move(cur.G);
  result.model.mean = mean;
  result.model.spectrum_fingerprint = fingerprint;
  return result;
}

FitResult fit(const CenteredDataset& ds, const GraphSpectrum& spectrum, int k, int L,
              const FitOptions& opts) {
  const SpectralCache cache = build_cache(ds.Xbar, spectrum, L);
  return fit_from(cache, init(ds, cache, k), ds.mean, spectrum_fingerprint(spectrum), opts);
}

double stationarity_residual(const FilterModel& model, const SpectralCache& cache) {
  const Filters f = model.filters();
  check_filters(cache, f);
  const Evaluation e = evaluate(cache, f);
  return frobenius_norm(grad_B_from(cache, e)) + grad_G_from(cache, f.B, e).norm();
}

}  // namespace gfred
