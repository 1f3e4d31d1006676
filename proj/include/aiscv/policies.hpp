#pragma once

#include "aiscv/core.hpp"

#include <Eigen/Cholesky>

namespace aiscv {

// Multivariate Student-t sampling policy with location `mean`, positive
// definite scale matrix and `dof` degrees of freedom. A draw is
// mean + L z sqrt(dof / S) with L the Cholesky factor of the scale matrix,
// z ~ N(0, I) and S ~ chi^2_dof; per point the d normals are consumed first,
// then the chi-square, which fixes the stream layout for reproducibility.
class StudentTPolicy {
 public:
  // Scale chosen as covariance * (dof - 2) / dof so that the sampling
  // distribution has exactly the requested covariance; requires dof > 2.
  static StudentTPolicy from_covariance(VectorXd mean, const MatrixXd& covariance, double dof);
  // Direct scale-matrix parameterization; any dof > 0 is accepted (dof = 1 is
  // the multivariate Cauchy), but such a policy has no finite covariance.
  static StudentTPolicy from_scale(VectorXd mean, MatrixXd scale_matrix, double dof);

  Eigen::Index dimension() const noexcept { return mean_.size(); }
  const VectorXd& mean() const noexcept { return mean_; }
  const MatrixXd& scale_matrix() const noexcept { return scale_; }
  double dof() const noexcept { return dof_; }

  // Same scale and dof, relocated; this is the adaptation step.
  StudentTPolicy with_mean(VectorXd new_mean) const;

  // count x d matrix of independent draws.
  MatrixXd sample(Eigen::Index count, RngStream& rng) const;
  double log_density(const VectorXd& x) const;

 private:
  StudentTPolicy(VectorXd mean, MatrixXd scale, double dof);

  VectorXd mean_;
  MatrixXd scale_;
  double dof_;
  Eigen::LLT<MatrixXd> chol_;
  double log_norm_const_;
};

// Defensive mixture (1 - eta) * adaptive + eta * anchor. The anchor component
// is never relocated, which keeps the mixture density bounded below by
// eta * anchor density and therefore keeps importance weights bounded when
// the anchor dominates the target.
class MixturePolicy {
 public:
  MixturePolicy(StudentTPolicy adaptive, StudentTPolicy anchor, double eta);

  Eigen::Index dimension() const noexcept { return adaptive_.dimension(); }
  const StudentTPolicy& adaptive() const noexcept { return adaptive_; }
  const StudentTPolicy& anchor() const noexcept { return anchor_; }
  double eta() const noexcept { return eta_; }

  MixturePolicy with_adaptive_mean(VectorXd new_mean) const;

  // Per point: one uniform picks the component (u < eta selects the anchor),
  // then that component consumes its own draws.
  MatrixXd sample(Eigen::Index count, RngStream& rng) const;
  double log_density(const VectorXd& x) const;

 private:
  StudentTPolicy adaptive_;
  StudentTPolicy anchor_;
  double eta_;
};

// Running importance-weighted mean of all particles seen so far, used as the
// cross-stage location update: after folding stages 1..t the mean() is
// sum_{s,i} w_si x_si / sum_{s,i} w_si.
class GmmAccumulator {
 public:
  explicit GmmAccumulator(Eigen::Index dimension);

  void fold(const MatrixXd& points, const VectorXd& weights);

  Eigen::Index dimension() const noexcept { return weighted_sum_.size(); }
  double weight_sum() const noexcept { return weight_sum_; }
  // Throws ZeroWeightSum until some positive weight has been folded.
  VectorXd mean() const;

 private:
  VectorXd weighted_sum_;
  double weight_sum_ = 0.0;
};

// Fold a batch and return the updated running mean.
VectorXd gmm_update(GmmAccumulator& acc, const MatrixXd& points, const VectorXd& weights);

}  // namespace aiscv
