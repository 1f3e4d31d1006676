#include "aiscv/estimator.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <ostream>

namespace aiscv {

namespace {

void check_weights(const ParticleStore& store) {
  if (store.size() == 0) throw std::invalid_argument("estimator: empty particle store");
  if (!(store.weights().sum() > 0.0))
    throw ZeroWeightSum("estimator: importance weights sum to zero");
}

void check_controls(const ParticleStore& store, const MatrixXd& controls) {
  if (controls.rows() != store.size())
    throw DimensionMismatch("estimator: " + std::to_string(controls.rows()) +
                            " control rows for " + std::to_string(store.size()) + " particles");
}

void check_integrands(const ParticleStore& store, const MatrixXd& integrand_values) {
  if (integrand_values.rows() != store.size())
    throw DimensionMismatch("estimator: " + std::to_string(integrand_values.rows()) +
                            " integrand rows for " + std::to_string(store.size()) + " particles");
  if (integrand_values.cols() == 0)
    throw std::invalid_argument("estimator: no integrand columns");
}

}  // namespace

double EstimateReport::scalar() const {
  if (value.size() != 1)
    throw std::logic_error("EstimateReport::scalar: report holds " +
                           std::to_string(value.size()) + " values");
  return value[0];
}

double effective_sample_size(const VectorXd& weights) {
  const double s = weights.sum();
  const double s2 = weights.squaredNorm();
  if (!(s2 > 0.0)) throw ZeroWeightSum("effective_sample_size: all weights are zero");
  return s * s / s2;
}

EstimateReport ais_estimate(const ParticleStore& store, const MatrixXd& integrand_values) {
  check_weights(store);
  check_integrands(store, integrand_values);
  const VectorXd& w = store.weights();
  const double wsum = w.sum();

  EstimateReport report;
  report.method = Method::Ais;
  report.particles_used = store.size();
  report.control_count = 0;
  report.value = (integrand_values.transpose() * w) / wsum;
  report.diagnostics.effective_sample_size = effective_sample_size(w);
  report.diagnostics.weight_sum_used = wsum;
  report.diagnostics.rank = 0;
  return report;
}

EstimateReport ais_estimate(const ParticleStore& store, const VectorXd& integrand_values) {
  return ais_estimate(store, MatrixXd(integrand_values));
}

EstimateReport aiscv_fit(const ParticleStore& store, const MatrixXd& controls,
                         const MatrixXd& integrand_values) {
  check_weights(store);
  check_controls(store, controls);
  check_integrands(store, integrand_values);
  const VectorXd& w = store.weights();
  const double wsum = w.sum();
  const Eigen::Index n = store.size();
  const Eigen::Index m = controls.cols();
  const Eigen::Index p = integrand_values.cols();

  // The intercept is identifiable iff the all-ones vector is not reproduced
  // by the controls under these weights; probe that before fitting.
  double s = wsum;
  if (m > 0) {
    const WlsSolution ones_fit = wls_fit(VectorXd::Ones(n), controls, w, /*with_intercept=*/false);
    s = w.dot(ones_fit.residuals);
    if (std::abs(s) <= kDegeneracyTolerance * wsum)
      throw DegenerateQuadrature(
          "aiscv_fit: control variates reproduce the constant function, the intercept is not "
          "identifiable; consider reducing the number of control variates");
  }

  EstimateReport report;
  report.method = Method::Aiscv;
  report.particles_used = n;
  report.control_count = m;
  report.value.resize(p);
  report.diagnostics.effective_sample_size = effective_sample_size(w);
  report.diagnostics.weight_sum_used = s;
  for (Eigen::Index j = 0; j < p; ++j) {
    const WlsSolution fit = wls_fit(integrand_values.col(j), controls, w, /*with_intercept=*/true);
    report.value[j] = fit.intercept;
    report.diagnostics.rank = fit.rank;
  }
  return report;
}

EstimateReport aiscv_fit(const ParticleStore& store, const MatrixXd& controls,
                         const VectorXd& integrand_values) {
  return aiscv_fit(store, controls, MatrixXd(integrand_values));
}

QuadratureRule build_quadrature(const ParticleStore& store, const MatrixXd& controls) {
  check_weights(store);
  check_controls(store, controls);
  const VectorXd& w = store.weights();
  const double wsum = w.sum();
  const Eigen::Index n = store.size();

  QuadratureRule rule;
  rule.points = store.points();
  if (controls.cols() == 0) {
    rule.raw_residuals = VectorXd::Ones(n);
    rule.weight_sum_used = wsum;
    rule.quad_weights = w / wsum;
    return rule;
  }

  const WlsSolution fit = wls_fit(VectorXd::Ones(n), controls, w, /*with_intercept=*/false);
  rule.raw_residuals = fit.residuals;
  const VectorXd u = w.cwiseProduct(rule.raw_residuals);
  rule.weight_sum_used = u.sum();
  if (std::abs(rule.weight_sum_used) <= kDegeneracyTolerance * wsum)
    throw DegenerateQuadrature(
        "build_quadrature: weighted residual mass of the all-ones fit vanished, the rule is "
        "degenerate; consider reducing the number of control variates");
  rule.quad_weights = u / rule.weight_sum_used;
  return rule;
}

VectorXd quadrature_apply(const QuadratureRule& rule, const MatrixXd& integrand_values) {
  if (integrand_values.rows() != rule.quad_weights.size())
    throw DimensionMismatch("quadrature_apply: " + std::to_string(integrand_values.rows()) +
                            " integrand rows for " + std::to_string(rule.quad_weights.size()) +
                            " quadrature weights");
  return integrand_values.transpose() * rule.quad_weights;
}

double quadrature_apply(const QuadratureRule& rule, const VectorXd& integrand_values) {
  return quadrature_apply(rule, MatrixXd(integrand_values))[0];
}

double matrix_form_oracle(const ParticleStore& store, const MatrixXd& controls,
                          const VectorXd& integrand_values) {
  check_weights(store);
  check_controls(store, controls);
  const Eigen::Index n = store.size();
  if (n > 500)
    throw std::invalid_argument("matrix_form_oracle: n = " + std::to_string(n) +
                                " exceeds the n <= 500 oracle limit");
  if (integrand_values.size() != n)
    throw DimensionMismatch("matrix_form_oracle: integrand size mismatch");
  const VectorXd& w = store.weights();
  const double wsum = w.sum();
  const VectorXd ones = VectorXd::Ones(n);

  VectorXd r1 = ones;
  VectorXd rg = integrand_values;
  if (controls.cols() > 0) {
    // Projector onto colspace(H) that is orthogonal under the weight metric:
    // P = H (W^{1/2} H)^+ W^{1/2}, built from the SVD pseudo-inverse.
    const VectorXd sqrt_w = w.cwiseSqrt();
    const MatrixXd b = sqrt_w.asDiagonal() * controls;
    Eigen::BDCSVD<MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double cutoff = kWlsRankTolerance * (sv.size() > 0 ? sv[0] : 0.0);
    VectorXd inv_sv = VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > cutoff) inv_sv[i] = 1.0 / sv[i];
    const MatrixXd pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
    const MatrixXd projector = controls * pinv * MatrixXd(sqrt_w.asDiagonal());
    r1 -= projector * ones;
    rg -= projector * integrand_values;
  }

  const double denominator = r1.dot(w.cwiseProduct(r1));
  if (std::abs(denominator) <= kDegeneracyTolerance * wsum)
    throw DegenerateQuadrature("matrix_form_oracle: projection annihilated the constant");
  const double numerator = r1.dot(w.cwiseProduct(rg));
  return numerator / denominator;
}

std::pair<EstimateReport, EstimateReport> invariance_check(const ParticleStore& store,
                                                           const MatrixXd& controls,
                                                           const MatrixXd& transform,
                                                           const VectorXd& integrand_values) {
  if (transform.rows() != controls.cols() || transform.cols() != controls.cols())
    throw DimensionMismatch("invariance_check: transform is " + std::to_string(transform.rows()) +
                            "x" + std::to_string(transform.cols()) + " for m = " +
                            std::to_string(controls.cols()));
  EstimateReport base = aiscv_fit(store, controls, integrand_values);
  EstimateReport transformed =
      aiscv_fit(store, MatrixXd(controls * transform.transpose()), integrand_values);
  return {std::move(base), std::move(transformed)};
}

void write_quadrature_csv(const ParticleStore& store, const QuadratureRule& rule,
                          std::ostream& out) {
  if (rule.quad_weights.size() != store.size())
    throw DimensionMismatch("write_quadrature_csv: rule and store sizes differ");
  const Eigen::Index d = store.dimension();
  out << "stage";
  for (Eigen::Index c = 0; c < d; ++c) out << ",x" << (c + 1);
  out << ",weight,residual_e,quad_weight_v\n";
  for (Eigen::Index i = 0; i < store.size(); ++i) {
    out << store.stage_of()[i];
    for (Eigen::Index c = 0; c < d; ++c) out << ',' << format_double(store.points()(i, c));
    out << ',' << format_double(store.weights()[i]) << ','
        << format_double(rule.raw_residuals[i]) << ',' << format_double(rule.quad_weights[i])
        << '\n';
  }
}

void write_quadrature_csv(const ParticleStore& store, const QuadratureRule& rule,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_quadrature_csv: cannot open " + path);
  write_quadrature_csv(store, rule, out);
  if (!out) throw std::runtime_error("write_quadrature_csv: write to " + path + " failed");
}

}  // namespace aiscv
