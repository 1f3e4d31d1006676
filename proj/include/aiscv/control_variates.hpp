#pragma once

#include "aiscv/core.hpp"
#include "aiscv/policies.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace aiscv {

enum class BasisKind { LegendrePairs, SteinMonomials };

// Gradient of the log target density, needed by the Stein construction.
struct ScoreFunction {
  std::function<VectorXd(const VectorXd&)> gradient;
  std::string label;
};

// A family of m control functions on R^d, each described by one row of the
// degree table: entry (i, j) is the degree of coordinate j in function i.
// For LegendrePairs the factor of degree p is the shifted Legendre polynomial
// on [0,1]; for SteinMonomials the row is the monomial exponent of the base
// function phi before the Stein operator is applied.
class ControlBasis {
 public:
  BasisKind kind() const noexcept { return kind_; }
  Eigen::Index dimension() const noexcept { return degrees_.cols(); }
  Eigen::Index size() const noexcept { return degrees_.rows(); }
  const Eigen::MatrixXi& degree_table() const noexcept { return degrees_; }
  int max_degree() const noexcept { return max_degree_; }

  friend ControlBasis legendre_pairs_basis(Eigen::Index dimension, int max_degree);
  friend ControlBasis stein_monomial_basis(Eigen::Index dimension, int max_total_degree);

 private:
  ControlBasis(BasisKind kind, Eigen::MatrixXi degrees, int max_degree);

  BasisKind kind_;
  Eigen::MatrixXi degrees_;
  int max_degree_;
};

// Tensor products of shifted Legendre polynomials touching at most two
// coordinates: all single-coordinate functions of degree 1..k (coordinate
// ascending, degree ascending within a coordinate), then all coordinate pairs
// c1 < c2 in lexicographic order with degree pairs (1,1), (1,2), ..., (k,k)
// also lexicographic. Size is k*d + k^2*d*(d-1)/2.
ControlBasis legendre_pairs_basis(Eigen::Index dimension, int max_degree);

// Stein-operator images of all monomials x^alpha with 1 <= |alpha| <= Q,
// enumerated in graded lexicographic order (total degree ascending, first
// coordinate's exponent descending within a grade). Size is C(d+Q, d) - 1.
ControlBasis stein_monomial_basis(Eigen::Index dimension, int max_total_degree);

// Values of the shifted Legendre polynomials P~_0..P~_max_degree at x,
// orthogonal on [0,1] and normalized so P~_j(1) = 1; every degree >= 1
// integrates to zero over [0,1].
VectorXd shifted_legendre_values(double x, int max_degree);

// n x m matrix of basis values at the given points. A Stein basis requires
// the score of the target; a Legendre basis must be called without one.
MatrixXd evaluate_basis(const ControlBasis& basis, const MatrixXd& points,
                        const ScoreFunction* score = nullptr);

// Self-normalized importance-sampling z-scores of each column of H under the
// weights: zhat_j = muhat_j / se(muhat_j). Large |z| flags a column whose
// weighted mean is inconsistent with zero. Exposed separately so callers can
// check arbitrary column matrices.
VectorXd zero_mean_zscores(const MatrixXd& h, const VectorXd& weights);

// Monte Carlo mean-zero diagnostic for a basis against a target given up to
// a constant: draws n_mc points from the reference policy, importance-weights
// them by exp(target_log_density - reference log density) and returns the
// per-column z-scores of the basis values.
VectorXd weighted_zero_mean_check(const ControlBasis& basis, const ScoreFunction* score,
                                  const std::function<double(const VectorXd&)>& target_log_density,
                                  const StudentTPolicy& reference, Eigen::Index n_mc,
                                  RngStream& rng);

}  // namespace aiscv
