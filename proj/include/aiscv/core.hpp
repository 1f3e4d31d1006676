#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace aiscv {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Thrown when a sum of importance weights that must be positive is zero
// (all particles landed outside the target support, or all weights are 0).
struct ZeroWeightSum : std::runtime_error {
  explicit ZeroWeightSum(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when matrix/vector shapes passed to an operation do not line up.
struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Deterministic per-replication random stream. Replication r of an experiment
// with base seed s uses RngStream(s, r); streams with distinct ids are
// decorrelated by a SplitMix64 scramble of (base_seed, stream_id) before
// seeding the underlying mt19937_64.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_id);

  std::uint64_t base_seed() const noexcept { return base_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // U(0,1)
  double uniform();
  // N(0,1)
  double standard_normal();
  // chi^2 with `dof` degrees of freedom, drawn as Gamma(dof/2, scale=2)
  double chi_square(double dof);
  // column vector of d iid N(0,1) draws
  VectorXd normal_vector(Eigen::Index d);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

// Collected particles from a staged sampling run: points (n x d), their
// importance weights, and the 1-based stage each row was drawn in. Rows are
// appended a stage at a time and never reordered, so the first sum(n_1..n_t)
// rows are exactly the particles available after stage t.
class ParticleStore {
 public:
  explicit ParticleStore(Eigen::Index dimension);

  void append_stage(const MatrixXd& points, const VectorXd& weights);

  Eigen::Index dimension() const noexcept { return dimension_; }
  Eigen::Index size() const noexcept { return points_.rows(); }
  int stage_count() const noexcept { return stage_count_; }

  const MatrixXd& points() const noexcept { return points_; }
  const VectorXd& weights() const noexcept { return weights_; }
  const VectorXi& stage_of() const noexcept { return stage_of_; }

  // Copy of the store restricted to stages 1..t (prefix of the rows).
  ParticleStore prefix(int stages) const;

 private:
  Eigen::Index dimension_;
  int stage_count_ = 0;
  MatrixXd points_;
  VectorXd weights_;
  VectorXi stage_of_;
};

// Result of a weighted least-squares fit. When the design is rank deficient
// the coefficient vector is the minimum-norm solution; fitted values are
// unique either way.
struct WlsSolution {
  double intercept = 0.0;
  VectorXd coefficients;
  VectorXd fitted;
  VectorXd residuals;
  Eigen::Index rank = 0;
};

// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kWlsRankTolerance = 1e-10;

// Self-normalized weighted mean sum(w*v)/sum(w). Weights must be nonnegative
// with a positive sum (throws ZeroWeightSum otherwise).
double weighted_mean(const VectorXd& values, const VectorXd& weights);

// Shortest round-trip decimal representation of a double, locale independent.
// All CSV output goes through this so that repeated runs are byte-identical.
std::string format_double(double value);

// Minimize sum_i w_i * (y_i - a - b.h_i)^2 over (a, b); with_intercept=false
// pins a = 0. Implemented by weighted centering plus an SVD of the
// sqrt(w)-scaled design, so zero weights are allowed and rank deficiency is
// handled (minimum-norm b). Throws ZeroWeightSum when sum(w) == 0 and
// std::invalid_argument on negative weights.
WlsSolution wls_fit(const VectorXd& response, const MatrixXd& design,
                    const VectorXd& weights, bool with_intercept,
                    double rank_tolerance = kWlsRankTolerance);

}  // namespace aiscv
