#include "aiscv/policies.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace aiscv {

namespace {

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

StudentTPolicy::StudentTPolicy(VectorXd mean, MatrixXd scale, double dof)
    : mean_(std::move(mean)), scale_(std::move(scale)), dof_(dof) {
  if (mean_.size() == 0) throw std::invalid_argument("StudentTPolicy: empty mean");
  if (scale_.rows() != mean_.size() || scale_.cols() != mean_.size())
    throw DimensionMismatch("StudentTPolicy: scale matrix is " + std::to_string(scale_.rows()) +
                            "x" + std::to_string(scale_.cols()) + " for dimension " +
                            std::to_string(mean_.size()));
  if (!(dof_ > 0.0)) throw std::invalid_argument("StudentTPolicy: dof must be positive");
  chol_.compute(scale_);
  if (chol_.info() != Eigen::Success)
    throw std::invalid_argument("StudentTPolicy: scale matrix is not positive definite");

  const double d = static_cast<double>(mean_.size());
  const double log_det_l = MatrixXd(chol_.matrixL()).diagonal().array().log().sum();
  log_norm_const_ = std::lgamma((dof_ + d) / 2.0) - std::lgamma(dof_ / 2.0) -
                    (d / 2.0) * std::log(dof_ * std::numbers::pi) - log_det_l;
}

StudentTPolicy StudentTPolicy::from_covariance(VectorXd mean, const MatrixXd& covariance,
                                               double dof) {
  if (!(dof > 2.0))
    throw std::invalid_argument(
        "StudentTPolicy::from_covariance: dof must exceed 2 for the covariance to exist");
  return StudentTPolicy(std::move(mean), covariance * ((dof - 2.0) / dof), dof);
}

StudentTPolicy StudentTPolicy::from_scale(VectorXd mean, MatrixXd scale_matrix, double dof) {
  return StudentTPolicy(std::move(mean), std::move(scale_matrix), dof);
}

StudentTPolicy StudentTPolicy::with_mean(VectorXd new_mean) const {
  if (new_mean.size() != mean_.size())
    throw DimensionMismatch("with_mean: dimension change from " + std::to_string(mean_.size()) +
                            " to " + std::to_string(new_mean.size()));
  StudentTPolicy out(*this);
  out.mean_ = std::move(new_mean);
  return out;
}

MatrixXd StudentTPolicy::sample(Eigen::Index count, RngStream& rng) const {
  if (count <= 0) throw std::invalid_argument("sample: count must be positive");
  const Eigen::Index d = dimension();
  MatrixXd out(count, d);
  const auto l = chol_.matrixL();
  for (Eigen::Index i = 0; i < count; ++i) {
    VectorXd z = rng.normal_vector(d);
    const double s = rng.chi_square(dof_);
    out.row(i) = (mean_ + l * z * std::sqrt(dof_ / s)).transpose();
  }
  return out;
}

double StudentTPolicy::log_density(const VectorXd& x) const {
  if (x.size() != mean_.size())
    throw DimensionMismatch("log_density: point has dimension " + std::to_string(x.size()) +
                            ", policy has " + std::to_string(mean_.size()));
  const VectorXd delta = chol_.matrixL().solve(x - mean_);
  const double maha = delta.squaredNorm();
  const double d = static_cast<double>(mean_.size());
  return log_norm_const_ - ((dof_ + d) / 2.0) * std::log1p(maha / dof_);
}

MixturePolicy::MixturePolicy(StudentTPolicy adaptive, StudentTPolicy anchor, double eta)
    : adaptive_(std::move(adaptive)), anchor_(std::move(anchor)), eta_(eta) {
  if (adaptive_.dimension() != anchor_.dimension())
    throw DimensionMismatch("MixturePolicy: component dimensions differ");
  if (!(eta > 0.0) || !(eta < 1.0))
    throw std::invalid_argument("MixturePolicy: eta must lie in (0, 1)");
}

MixturePolicy MixturePolicy::with_adaptive_mean(VectorXd new_mean) const {
  return MixturePolicy(adaptive_.with_mean(std::move(new_mean)), anchor_, eta_);
}

MatrixXd MixturePolicy::sample(Eigen::Index count, RngStream& rng) const {
  if (count <= 0) throw std::invalid_argument("sample: count must be positive");
  MatrixXd out(count, dimension());
  for (Eigen::Index i = 0; i < count; ++i) {
    const StudentTPolicy& comp = rng.uniform() < eta_ ? anchor_ : adaptive_;
    out.row(i) = comp.sample(1, rng).row(0);
  }
  return out;
}

double MixturePolicy::log_density(const VectorXd& x) const {
  const double la = std::log1p(-eta_) + adaptive_.log_density(x);
  const double lb = std::log(eta_) + anchor_.log_density(x);
  return log_sum_exp(la, lb);
}

GmmAccumulator::GmmAccumulator(Eigen::Index dimension) {
  if (dimension <= 0) throw std::invalid_argument("GmmAccumulator: dimension must be positive");
  weighted_sum_ = VectorXd::Zero(dimension);
}

void GmmAccumulator::fold(const MatrixXd& points, const VectorXd& weights) {
  if (points.cols() != weighted_sum_.size())
    throw DimensionMismatch("fold: points have " + std::to_string(points.cols()) +
                            " columns, accumulator dimension is " +
                            std::to_string(weighted_sum_.size()));
  if (points.rows() != weights.size())
    throw DimensionMismatch("fold: " + std::to_string(points.rows()) + " points vs " +
                            std::to_string(weights.size()) + " weights");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("fold: negative weight");
  weighted_sum_ += points.transpose() * weights;
  weight_sum_ += weights.sum();
}

VectorXd GmmAccumulator::mean() const {
  if (!(weight_sum_ > 0.0))
    throw ZeroWeightSum("GmmAccumulator::mean: no positive weight folded yet");
  return weighted_sum_ / weight_sum_;
}

VectorXd gmm_update(GmmAccumulator& acc, const MatrixXd& points, const VectorXd& weights) {
  acc.fold(points, weights);
  return acc.mean();
}

}  // namespace aiscv
