#pragma once

#include "aiscv/control_variates.hpp"
#include "aiscv/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace aiscv {

// Thrown when a prior or posterior covariance cannot be factorized.
struct SingularPrior : std::runtime_error {
  explicit SingularPrior(const std::string& what) : std::runtime_error(what) {}
};

// An integration target known up to a normalizing constant. Points outside
// the support get log density -infinity (weight zero). The score, when
// available, is the gradient of the log density on the support.
struct Target {
  Eigen::Index dimension = 0;
  std::function<double(const VectorXd&)> log_density_unnormalized;
  std::optional<ScoreFunction> score;
  std::string label;
};

// A test function together with its known integral under the target.
struct Integrand {
  std::string label;
  std::function<double(const VectorXd&)> eval;
  double ground_truth = 0.0;
};

// Uniform distribution on the unit cube [0,1]^d, constant log density inside.
// No score (the density is not differentiable at the boundary and the Stein
// construction does not apply).
Target uniform_cube_target(Eigen::Index dimension);

// The three standard cube test integrands, each integrating to exactly 1:
//   g1: 1 + sin(pi * (2/d * sum(x) - 1))
//   g2: prod_j sqrt(2/pi) / x_j * exp(-log(x_j)^2 / 2)   (log-normal kernel)
//   g3: prod_j log(2) * 2^(1 - x_j)
// g2 is defined as 0 when any coordinate is <= 0, so that zero-weight
// particles outside the cube cannot poison estimates with NaN.
std::vector<Integrand> cube_integrands(Eigen::Index dimension);

enum class MixtureVariant { Isotropic, Anisotropic };

// Two-component Gaussian mixture in R^d with centers +/- mu, mu = 1/(2 sqrt(d)):
//   Isotropic:   weights (1/2, 1/2), both covariances I/d
//   Anisotropic: weights (3/4, 1/4), both covariances diag(10, 1, ..., 1)/d
// The score is the responsibility-weighted average of the component scores.
Target gaussian_mixture_target(Eigen::Index dimension, MixtureVariant variant);

// Exact mean of the mixture, the ground truth for the identity integrand.
VectorXd gaussian_mixture_mean(Eigen::Index dimension, MixtureVariant variant);

// Conjugate Gaussian posterior for Bayesian linear regression
// y ~ N(X theta, sigma^2 I) with prior theta ~ N(prior_mean, prior_cov).
struct BlrPosterior {
  MatrixXd features;
  VectorXd responses;
  double noise_sigma = 1.0;
  VectorXd prior_mean;
  MatrixXd prior_cov;
  VectorXd posterior_mean;
  MatrixXd posterior_cov;

  Eigen::Index dimension() const noexcept { return posterior_mean.size(); }
  // Log posterior up to a constant, with exact score X'(y - X theta)/sigma^2
  // - prior_cov^-1 (theta - prior_mean).
  Target target() const;
  // E ||theta||^2 = ||posterior_mean||^2 + trace(posterior_cov).
  double squared_norm_ground_truth() const;
};

BlrPosterior blr_posterior(const MatrixXd& features, const VectorXd& responses, double noise_sigma,
                           const VectorXd& prior_mean, const MatrixXd& prior_cov);

// Score of the logistic-regression log likelihood X'(y - sigmoid(X theta)),
// for targets whose posterior has no closed form.
VectorXd logistic_score(const MatrixXd& features, const VectorXd& responses,
                        const VectorXd& theta);

}  // namespace aiscv
