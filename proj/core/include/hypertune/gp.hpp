#pragma once

#include <Eigen/Core>

#include "hypertune/rng.hpp"

namespace hypertune::gp {

/// Matern 5/2 kernel with per-dimension (ARD) lengthscales.
struct KernelParams {
  Eigen::VectorXd lengthscales;  // one per input dimension, > 0
  double signal_var = 1.0;       // sigma_f^2
  double noise_var = 1e-6;       // sigma_n^2, added on the diagonal
};

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const KernelParams& params);

/// Gaussian process posterior over standardized targets. `inputs` rows are
/// points; `targets_std` has mean 0 / sd 1 in model units, and predictions
/// are mapped back through (target_mean, target_sd).
struct GpModel {
  Eigen::MatrixXd inputs;       // n x d
  Eigen::VectorXd targets_std;  // n
  double target_mean = 0.0;
  double target_sd = 1.0;
  KernelParams kernel;          // noise_var includes any jitter applied
  Eigen::MatrixXd chol_lower;   // L with L L^T = K + noise_var I
  Eigen::VectorXd alpha;        // (K + noise_var I)^{-1} targets_std
  double log_marginal_value = 0.0;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }
};

/// Log marginal likelihood of standardized targets under the kernel:
///   -1/2 y^T (K + s I)^{-1} y - 1/2 log |K + s I| - n/2 log(2 pi).
/// The Gram matrix is factorized by Cholesky; on failure a jitter term is
/// escalated from 1e-10 by factors of 10 up to 1e-4 before giving up.
double log_marginal(const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& targets_std,
                    const KernelParams& params);

/// Builds the posterior for fixed kernel parameters. Targets are raw
/// (natural units); standardization happens here. Constant targets get
/// target_sd floored at 1e-12 so the model stays finite.
GpModel gp_build(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                 const KernelParams& params);

/// Fits kernel parameters by maximizing log marginal likelihood with
/// multi-restart coordinate search in log10-parameter space. Restart starting
/// points are drawn from `rng` (per restart: each lengthscale log-uniform in
/// [0.05, 2], then signal_var in [0.25, 4], then noise_var in [1e-8, 1e-2]).
/// Ties keep the earliest candidate. Constant targets short-circuit to a
/// noise-dominated kernel.
GpModel gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
               int restarts, Rng& rng);

struct Prediction {
  double mean = 0.0;  // natural units
  double var = 0.0;   // natural units squared, latent (no observation noise)
};

Prediction gp_predict(const GpModel& model, const Eigen::VectorXd& x);

double normal_pdf(double z);
double normal_cdf(double z);

/// Expected improvement of a Gaussian with the given mean/variance over
/// `best_value`, with exploration margin `xi` in the same units as mean.
/// maximize=true improves upward. Returns max(0, delta) when variance is 0.
double expected_improvement_value(double mean, double var, double best_value,
                                  double xi, bool maximize);

/// EI at x under the model. `xi` is expressed as a fraction of the target
/// standard deviation, which makes the acquisition invariant to affine
/// transformations of the objective.
double expected_improvement(const GpModel& model, const Eigen::VectorXd& x,
                            double best_value, double xi, bool maximize);

}  // namespace hypertune::gp
