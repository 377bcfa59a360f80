#include "hypertune/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "hypertune/error.hpp"

namespace hypertune::gp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;
constexpr double kConstantTargetSdFloor = 1e-12;

// Pairwise squared differences per input dimension, computed once so kernel
// evaluations during hyperparameter search only rescale and sum.
struct PairwiseCache {
  std::vector<Eigen::MatrixXd> sqdiff;  // one n x n matrix per dimension
  Eigen::Index n = 0;
  Eigen::Index d = 0;
};

PairwiseCache build_pairwise(const Eigen::MatrixXd& inputs) {
  PairwiseCache cache;
  cache.n = inputs.rows();
  cache.d = inputs.cols();
  cache.sqdiff.reserve(static_cast<std::size_t>(cache.d));
  for (Eigen::Index j = 0; j < cache.d; ++j) {
    const Eigen::VectorXd col = inputs.col(j);
    Eigen::MatrixXd m(cache.n, cache.n);
    for (Eigen::Index r = 0; r < cache.n; ++r) {
      for (Eigen::Index c = 0; c <= r; ++c) {
        const double diff = col[r] - col[c];
        m(r, c) = diff * diff;
        m(c, r) = m(r, c);
      }
    }
    cache.sqdiff.push_back(std::move(m));
  }
  return cache;
}

double matern52_from_r2(double r2, double signal_var) {
  const double s = std::sqrt(5.0 * std::max(r2, 0.0));
  return signal_var * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

Eigen::MatrixXd gram_matrix(const PairwiseCache& cache,
                            const KernelParams& params) {
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(cache.n, cache.n);
  for (Eigen::Index j = 0; j < cache.d; ++j) {
    const double inv = 1.0 / (params.lengthscales[j] * params.lengthscales[j]);
    r2.noalias() += inv * cache.sqdiff[static_cast<std::size_t>(j)];
  }
  Eigen::MatrixXd k(cache.n, cache.n);
  for (Eigen::Index r = 0; r < cache.n; ++r) {
    for (Eigen::Index c = 0; c <= r; ++c) {
      k(r, c) = matern52_from_r2(r2(r, c), params.signal_var);
      k(c, r) = k(r, c);
    }
  }
  return k;
}

struct Factorization {
  Eigen::MatrixXd lower;
  double effective_noise = 0.0;
};

// Cholesky of K + noise I with jitter escalation. A factorization counts as
// failed if Eigen reports a numerical issue or the diagonal is not strictly
// positive.
Factorization factorize(const Eigen::MatrixXd& k, double noise_var) {
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd m = k;
    m.diagonal().array() += noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd lower = llt.matrixL();
      if (lower.diagonal().minCoeff() > 0.0 &&
          lower.allFinite()) {
        return Factorization{std::move(lower), noise_var + jitter};
      }
    }
    if (jitter >= kJitterMax) {
      throw Error("ill-conditioned kernel: Cholesky failed at max jitter");
    }
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
  }
}

double log_marginal_from_factors(const Eigen::MatrixXd& lower,
                                 const Eigen::VectorXd& y) {
  const auto n = static_cast<double>(y.size());
  const Eigen::VectorXd alpha = lower.transpose()
                                    .triangularView<Eigen::Upper>()
                                    .solve(lower.triangularView<Eigen::Lower>()
                                               .solve(y));
  const double log_det_half = lower.diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - log_det_half - 0.5 * n * std::log(2.0 * kPi);
}

double log_marginal_cached(const PairwiseCache& cache,
                           const Eigen::VectorXd& targets_std,
                           const KernelParams& params) {
  const Eigen::MatrixXd k = gram_matrix(cache, params);
  const Factorization f = factorize(k, params.noise_var);
  return log_marginal_from_factors(f.lower, targets_std);
}

void check_shapes(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& y,
                  const KernelParams* params) {
  if (inputs.rows() < 1) throw Error("gp: need at least one observation");
  if (y.size() != inputs.rows()) {
    throw Error("gp: targets length does not match input rows");
  }
  if (params != nullptr) {
    if (params->lengthscales.size() != inputs.cols()) {
      throw Error("gp: lengthscale count does not match input dimension");
    }
    if (params->lengthscales.minCoeff() <= 0.0 || params->signal_var <= 0.0 ||
        params->noise_var < 0.0) {
      throw Error("gp: kernel parameters out of range");
    }
  }
}

}  // namespace

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                const KernelParams& params) {
  if (a.size() != b.size() || a.size() != params.lengthscales.size()) {
    throw Error("matern52: dimension mismatch");
  }
  double r2 = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double diff = (a[j] - b[j]) / params.lengthscales[j];
    r2 += diff * diff;
  }
  return matern52_from_r2(r2, params.signal_var);
}

double log_marginal(const Eigen::MatrixXd& inputs,
                    const Eigen::VectorXd& targets_std,
                    const KernelParams& params) {
  check_shapes(inputs, targets_std, &params);
  return log_marginal_cached(build_pairwise(inputs), targets_std, params);
}

GpModel gp_build(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                 const KernelParams& params) {
  check_shapes(inputs, targets, &params);
  GpModel model;
  model.inputs = inputs;
  // Fitted models keep noise at or above the jitter floor so the posterior
  // stays numerically sane even when callers ask for exact interpolation.
  model.target_mean = targets.mean();
  const auto n = static_cast<double>(targets.size());
  const double var =
      (targets.array() - model.target_mean).square().sum() / n;
  model.target_sd = std::max(std::sqrt(var), kConstantTargetSdFloor);
  model.targets_std =
      (targets.array() - model.target_mean) / model.target_sd;
  model.kernel = params;
  model.kernel.noise_var = std::max(model.kernel.noise_var, kJitterStart);

  const PairwiseCache cache = build_pairwise(inputs);
  const Eigen::MatrixXd k = gram_matrix(cache, model.kernel);
  Factorization f = factorize(k, model.kernel.noise_var);
  model.kernel.noise_var = f.effective_noise;
  model.chol_lower = std::move(f.lower);
  model.alpha = model.chol_lower.transpose()
                    .triangularView<Eigen::Upper>()
                    .solve(model.chol_lower.triangularView<Eigen::Lower>()
                               .solve(model.targets_std));
  model.log_marginal_value =
      log_marginal_from_factors(model.chol_lower, model.targets_std);
  return model;
}

GpModel gp_fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
               int restarts, Rng& rng) {
  check_shapes(inputs, targets, nullptr);
  if (inputs.rows() < 2) throw Error("gp_fit: need at least two observations");
  if (restarts < 1) throw Error("gp_fit: restarts must be >= 1");
  const Eigen::Index d = inputs.cols();

  const double mean = targets.mean();
  const double sd = std::sqrt(
      (targets.array() - mean).square().sum() /
      static_cast<double>(targets.size()));
  if (sd < kConstantTargetSdFloor) {
    // Constant targets carry no signal; a noise-dominated kernel makes the
    // posterior revert to the constant with negligible variance everywhere.
    KernelParams flat;
    flat.lengthscales = Eigen::VectorXd::Ones(d);
    flat.signal_var = kConstantTargetSdFloor;
    flat.noise_var = 1.0;
    return gp_build(inputs, targets, flat);
  }

  const Eigen::VectorXd targets_std = (targets.array() - mean) / sd;
  const PairwiseCache cache = build_pairwise(inputs);

  // Coordinate search happens on theta = log10 of each kernel parameter:
  // [lengthscale_0 .. lengthscale_{d-1}, signal_var, noise_var].
  const Eigen::Index n_theta = d + 2;
  auto clamp_theta = [&](Eigen::VectorXd& theta) {
    for (Eigen::Index j = 0; j < d; ++j) {
      theta[j] = std::clamp(theta[j], -3.0, 3.0);
    }
    theta[d] = std::clamp(theta[d], -8.0, 6.0);
    theta[d + 1] = std::clamp(theta[d + 1], -10.0, 1.0);
  };
  auto kernel_of = [&](const Eigen::VectorXd& theta) {
    KernelParams p;
    p.lengthscales = Eigen::VectorXd(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      p.lengthscales[j] = std::pow(10.0, theta[j]);
    }
    p.signal_var = std::pow(10.0, theta[d]);
    p.noise_var = std::pow(10.0, theta[d + 1]);
    return p;
  };
  auto objective = [&](const Eigen::VectorXd& theta) {
    return log_marginal_cached(cache, targets_std, kernel_of(theta));
  };

  constexpr int kSweeps = 8;
  constexpr double kInitialStep = 0.4;

  Eigen::VectorXd best_theta;
  double best_lm = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd theta(n_theta);
    for (Eigen::Index j = 0; j < d; ++j) {
      theta[j] = rng.uniform(std::log10(0.05), std::log10(2.0));
    }
    theta[d] = rng.uniform(std::log10(0.25), std::log10(4.0));
    theta[d + 1] = rng.uniform(-8.0, -2.0);

    double current = objective(theta);
    if (current > best_lm) {
      best_lm = current;
      best_theta = theta;
    }
    double step = kInitialStep;
    for (int sweep = 0; sweep < kSweeps; ++sweep) {
      for (Eigen::Index c = 0; c < n_theta; ++c) {
        for (const double direction : {+1.0, -1.0}) {
          Eigen::VectorXd candidate = theta;
          candidate[c] += direction * step;
          clamp_theta(candidate);
          double value;
          try {
            value = objective(candidate);
          } catch (const Error&) {
            continue;  // untenable corner of parameter space, skip
          }
          if (value > current) {
            current = value;
            theta = candidate;
          }
        }
      }
      if (current > best_lm) {
        best_lm = current;
        best_theta = theta;
      }
      step *= 0.5;
    }
  }

  GpModel model = gp_build(inputs, targets, kernel_of(best_theta));
  return model;
}

Prediction gp_predict(const GpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim()) {
    throw Error("gp_predict: point has wrong dimension");
  }
  const Eigen::Index n = model.size();
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kstar[i] = matern52(model.inputs.row(i).transpose(), x, model.kernel);
  }
  const double mean_std = kstar.dot(model.alpha);
  const Eigen::VectorXd v =
      model.chol_lower.triangularView<Eigen::Lower>().solve(kstar);
  const double var_std =
      std::max(model.kernel.signal_var - v.squaredNorm(), 0.0);
  Prediction out;
  out.mean = model.target_mean + model.target_sd * mean_std;
  out.var = model.target_sd * model.target_sd * var_std;
  return out;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double expected_improvement_value(double mean, double var, double best_value,
                                  double xi, bool maximize) {
  const double delta =
      maximize ? mean - best_value - xi : best_value - mean - xi;
  const double sigma = std::sqrt(std::max(var, 0.0));
  if (sigma == 0.0) return std::max(0.0, delta);
  const double z = delta / sigma;
  const double ei = delta * normal_cdf(z) + sigma * normal_pdf(z);
  return std::max(ei, 0.0);
}

double expected_improvement(const GpModel& model, const Eigen::VectorXd& x,
                            double best_value, double xi, bool maximize) {
  const Prediction p = gp_predict(model, x);
  return expected_improvement_value(p.mean, p.var, best_value,
                                    xi * model.target_sd, maximize);
}

}  // namespace hypertune::gp
