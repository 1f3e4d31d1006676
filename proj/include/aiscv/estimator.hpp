#pragma once

#include "aiscv/core.hpp"

#include <iosfwd>
#include <string>
#include <utility>

namespace aiscv {

// Thrown when the constant function is numerically reproducible by the
// control variates, which makes the regression intercept (and the quadrature
// normalization) non-identifiable.
struct DegenerateQuadrature : std::runtime_error {
  explicit DegenerateQuadrature(const std::string& what) : std::runtime_error(what) {}
};

// |s| <= kDegeneracyTolerance * sum(w) declares the rule degenerate.
inline constexpr double kDegeneracyTolerance = 1e-12;

// Integrand-independent signed quadrature rule built from one particle set:
// quad_weights v_i = w_i e_i / s with e_i the residual of fitting the
// all-ones vector on the control variates and s = sum(w_i e_i). The weights
// sum to 1 by construction and may be negative.
struct QuadratureRule {
  MatrixXd points;
  VectorXd quad_weights;
  VectorXd raw_residuals;
  double weight_sum_used = 0.0;
};

enum class Method { Ais, Aiscv };

struct EstimateDiagnostics {
  double effective_sample_size = 0.0;  // (sum w)^2 / sum(w^2)
  double weight_sum_used = 0.0;        // s for AISCV, sum(w) for AIS
  Eigen::Index rank = 0;               // control-variate fit rank (0 for AIS)
};

struct EstimateReport {
  VectorXd value;  // one entry per integrand column
  Method method = Method::Ais;
  Eigen::Index particles_used = 0;
  Eigen::Index control_count = 0;
  EstimateDiagnostics diagnostics;

  double scalar() const;  // value[0]; throws if the report is not scalar
};

double effective_sample_size(const VectorXd& weights);

// Self-normalized importance-sampling mean of each integrand column:
// sum(w g) / sum(w). Throws ZeroWeightSum.
EstimateReport ais_estimate(const ParticleStore& store, const MatrixXd& integrand_values);
EstimateReport ais_estimate(const ParticleStore& store, const VectorXd& integrand_values);

// Intercept of the weighted least-squares regression of each integrand column
// on the control variates H (with intercept, weights from the store). Exact
// for integrands of the form a + H b. Throws DegenerateQuadrature when the
// intercept is not identifiable and ZeroWeightSum when sum(w) == 0.
EstimateReport aiscv_fit(const ParticleStore& store, const MatrixXd& controls,
                         const MatrixXd& integrand_values);
EstimateReport aiscv_fit(const ParticleStore& store, const MatrixXd& controls,
                         const VectorXd& integrand_values);

// Builds the integrand-independent rule: no-intercept fit of the all-ones
// vector on H under the store weights, e = residuals, v = (w o e)/s.
QuadratureRule build_quadrature(const ParticleStore& store, const MatrixXd& controls);

// Columnwise dot product of integrand values with the quadrature weights.
VectorXd quadrature_apply(const QuadratureRule& rule, const MatrixXd& integrand_values);
double quadrature_apply(const QuadratureRule& rule, const VectorXd& integrand_values);

// Direct evaluation of the regression intercept from the weighted projection
// onto the column space of H, as a quotient of quadratic forms. Builds an
// n x n projector, so it is restricted to n <= 500 and meant as a cross-check
// for the other two routes, not for production use.
double matrix_form_oracle(const ParticleStore& store, const MatrixXd& controls,
                          const VectorXd& integrand_values);

// Fits under H and under H * A^T (the basis transformed by an invertible A);
// the two estimates agree up to conditioning, which is the invariance the
// caller asserts.
std::pair<EstimateReport, EstimateReport> invariance_check(const ParticleStore& store,
                                                           const MatrixXd& controls,
                                                           const MatrixXd& transform,
                                                           const VectorXd& integrand_values);

// CSV serialization of a rule next to its particles: header row, then one row
// per particle with stage, coordinates x1..xd, importance weight, residual e
// and quadrature weight v.
void write_quadrature_csv(const ParticleStore& store, const QuadratureRule& rule,
                          std::ostream& out);
void write_quadrature_csv(const ParticleStore& store, const QuadratureRule& rule,
                          const std::string& path);

}  // namespace aiscv
