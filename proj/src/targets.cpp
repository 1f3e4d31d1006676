#include "aiscv/targets.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace aiscv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_gaussian(const VectorXd& x, const VectorXd& mean, const Eigen::LLT<MatrixXd>& chol,
                    double log_det_l) {
  const double d = static_cast<double>(x.size());
  const VectorXd delta = chol.matrixL().solve(x - mean);
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - log_det_l - 0.5 * delta.squaredNorm();
}

}  // namespace

Target uniform_cube_target(Eigen::Index dimension) {
  if (dimension < 1) throw std::invalid_argument("uniform_cube_target: dimension must be >= 1");
  Target t;
  t.dimension = dimension;
  t.label = "uniform-cube";
  t.log_density_unnormalized = [](const VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!(x[i] >= 0.0 && x[i] <= 1.0)) return kNegInf;
    return 0.0;
  };
  return t;
}

std::vector<Integrand> cube_integrands(Eigen::Index dimension) {
  if (dimension < 1) throw std::invalid_argument("cube_integrands: dimension must be >= 1");
  const double d = static_cast<double>(dimension);
  std::vector<Integrand> out(3);

  out[0].label = "g1";
  out[0].ground_truth = 1.0;
  out[0].eval = [d](const VectorXd& x) {
    return 1.0 + std::sin(std::numbers::pi * (2.0 / d * x.sum() - 1.0));
  };

  out[1].label = "g2";
  out[1].ground_truth = 1.0;
  out[1].eval = [](const VectorXd& x) {
    double v = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      // Continuity limit 0 at the coordinate axes; also covers negative
      // coordinates of zero-weight particles outside the cube.
      if (!(x[i] > 0.0)) return 0.0;
      const double lx = std::log(x[i]);
      v *= std::sqrt(2.0 / std::numbers::pi) / x[i] * std::exp(-0.5 * lx * lx);
    }
    return v;
  };

  out[2].label = "g3";
  out[2].ground_truth = 1.0;
  out[2].eval = [](const VectorXd& x) {
    double v = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      v *= std::numbers::ln2 * std::exp2(1.0 - x[i]);
    return v;
  };

  return out;
}

VectorXd gaussian_mixture_mean(Eigen::Index dimension, MixtureVariant variant) {
  const VectorXd mu = VectorXd::Constant(dimension, 1.0 / (2.0 * std::sqrt(static_cast<double>(dimension))));
  // First moment w1*mu + w2*(-mu).
  return variant == MixtureVariant::Isotropic ? VectorXd(VectorXd::Zero(dimension))
                                              : VectorXd(0.5 * mu);
}

Target gaussian_mixture_target(Eigen::Index dimension, MixtureVariant variant) {
  if (dimension < 1) throw std::invalid_argument("gaussian_mixture_target: dimension must be >= 1");
  const double d = static_cast<double>(dimension);
  const VectorXd mu = VectorXd::Constant(dimension, 1.0 / (2.0 * std::sqrt(d)));

  MatrixXd cov;
  double w1;
  if (variant == MixtureVariant::Isotropic) {
    cov = MatrixXd::Identity(dimension, dimension) / d;
    w1 = 0.5;
  } else {
    VectorXd diag = VectorXd::Ones(dimension);
    diag[0] = 10.0;
    cov = (diag / d).asDiagonal();
    w1 = 0.75;
  }
  const double w2 = 1.0 - w1;

  auto chol = std::make_shared<Eigen::LLT<MatrixXd>>(cov);
  if (chol->info() != Eigen::Success)
    throw std::invalid_argument("gaussian_mixture_target: covariance not positive definite");
  const double log_det_l = MatrixXd(chol->matrixL()).diagonal().array().log().sum();
  auto precision = std::make_shared<MatrixXd>(
      chol->solve(MatrixXd::Identity(dimension, dimension)));

  Target t;
  t.dimension = dimension;
  t.label = variant == MixtureVariant::Isotropic ? "gaussian-mixture-isotropic"
                                                 : "gaussian-mixture-anisotropic";
  t.log_density_unnormalized = [mu, chol, log_det_l, w1, w2](const VectorXd& x) {
    const double l1 = std::log(w1) + log_gaussian(x, mu, *chol, log_det_l);
    const double l2 = std::log(w2) + log_gaussian(x, -mu, *chol, log_det_l);
    const double m = std::max(l1, l2);
    return m + std::log(std::exp(l1 - m) + std::exp(l2 - m));
  };

  ScoreFunction score;
  score.label = t.label + "-score";
  score.gradient = [mu, chol, precision, log_det_l, w1, w2](const VectorXd& x) {
    const double l1 = std::log(w1) + log_gaussian(x, mu, *chol, log_det_l);
    const double l2 = std::log(w2) + log_gaussian(x, -mu, *chol, log_det_l);
    const double m = std::max(l1, l2);
    const double e1 = std::exp(l1 - m);
    const double e2 = std::exp(l2 - m);
    const double r1 = e1 / (e1 + e2);
    const double r2 = e2 / (e1 + e2);
    return VectorXd(-(*precision) * (r1 * (x - mu) + r2 * (x + mu)));
  };
  t.score = std::move(score);
  return t;
}

BlrPosterior blr_posterior(const MatrixXd& features, const VectorXd& responses, double noise_sigma,
                           const VectorXd& prior_mean, const MatrixXd& prior_cov) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (responses.size() != n)
    throw DimensionMismatch("blr_posterior: " + std::to_string(n) + " rows vs " +
                            std::to_string(responses.size()) + " responses");
  if (prior_mean.size() != d || prior_cov.rows() != d || prior_cov.cols() != d)
    throw DimensionMismatch("blr_posterior: prior shapes do not match feature dimension " +
                            std::to_string(d));
  if (n < d)
    throw std::invalid_argument("blr_posterior: fewer observations than features");
  if (!(noise_sigma > 0.0))
    throw std::invalid_argument("blr_posterior: noise sigma must be positive");

  Eigen::LLT<MatrixXd> prior_chol(prior_cov);
  if (prior_chol.info() != Eigen::Success)
    throw SingularPrior("blr_posterior: prior covariance is not positive definite");
  const MatrixXd prior_precision = prior_chol.solve(MatrixXd::Identity(d, d));

  const double inv_s2 = 1.0 / (noise_sigma * noise_sigma);
  const MatrixXd a = inv_s2 * (features.transpose() * features) + prior_precision;
  Eigen::LLT<MatrixXd> a_chol(a);
  if (a_chol.info() != Eigen::Success)
    throw SingularPrior("blr_posterior: posterior precision is not positive definite");

  BlrPosterior post;
  post.features = features;
  post.responses = responses;
  post.noise_sigma = noise_sigma;
  post.prior_mean = prior_mean;
  post.prior_cov = prior_cov;
  // Solve for the mean directly instead of forming Sigma_b * rhs.
  post.posterior_mean =
      a_chol.solve(inv_s2 * (features.transpose() * responses) + prior_precision * prior_mean);
  post.posterior_cov = a_chol.solve(MatrixXd::Identity(d, d));
  return post;
}

Target BlrPosterior::target() const {
  Target t;
  t.dimension = dimension();
  t.label = "blr-posterior";

  const MatrixXd x = features;
  const VectorXd y = responses;
  const double inv_s2 = 1.0 / (noise_sigma * noise_sigma);
  const VectorXd mu_a = prior_mean;
  Eigen::LLT<MatrixXd> prior_chol(prior_cov);
  if (prior_chol.info() != Eigen::Success)
    throw SingularPrior("BlrPosterior::target: prior covariance is not positive definite");
  const MatrixXd prior_precision =
      prior_chol.solve(MatrixXd::Identity(prior_cov.rows(), prior_cov.cols()));

  t.log_density_unnormalized = [x, y, inv_s2, mu_a, prior_precision](const VectorXd& theta) {
    const VectorXd resid = y - x * theta;
    const VectorXd dev = theta - mu_a;
    return -0.5 * inv_s2 * resid.squaredNorm() - 0.5 * dev.dot(prior_precision * dev);
  };

  ScoreFunction score;
  score.label = "blr-posterior-score";
  score.gradient = [x, y, inv_s2, mu_a, prior_precision](const VectorXd& theta) {
    return VectorXd(inv_s2 * (x.transpose() * (y - x * theta)) -
                    prior_precision * (theta - mu_a));
  };
  t.score = std::move(score);
  return t;
}

double BlrPosterior::squared_norm_ground_truth() const {
  return posterior_mean.squaredNorm() + posterior_cov.trace();
}

VectorXd logistic_score(const MatrixXd& features, const VectorXd& responses,
                        const VectorXd& theta) {
  if (features.rows() != responses.size())
    throw DimensionMismatch("logistic_score: " + std::to_string(features.rows()) + " rows vs " +
                            std::to_string(responses.size()) + " responses");
  if (features.cols() != theta.size())
    throw DimensionMismatch("logistic_score: feature dimension " +
                            std::to_string(features.cols()) + " vs theta dimension " +
                            std::to_string(theta.size()));
  const VectorXd eta = features * theta;
  VectorXd probs(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // Numerically stable sigmoid on both tails.
    if (eta[i] >= 0.0)
      probs[i] = 1.0 / (1.0 + std::exp(-eta[i]));
    else {
      const double e = std::exp(eta[i]);
      probs[i] = e / (1.0 + e);
    }
  }
  return features.transpose() * (responses - probs);
}

}  // namespace aiscv
