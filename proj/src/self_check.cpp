#include "aiscv/harness.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace aiscv {

namespace {

struct CheckReporter {
  std::ostream& out;
  int failures = 0;

  void report(const std::string& name, bool ok, const std::string& detail = "") {
    out << (ok ? "PASS " : "FAIL ") << name;
    if (!ok && !detail.empty()) out << ": " << detail;
    out << '\n';
    if (!ok) ++failures;
  }
};

MatrixXd random_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.standard_normal();
  return m;
}

ParticleStore random_store(RngStream& rng, Eigen::Index n, Eigen::Index d) {
  ParticleStore store(d);
  MatrixXd pts(n, d);
  VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) pts(i, j) = rng.uniform();
    w[i] = 0.1 + rng.uniform();
  }
  store.append_stage(pts, w);
  return store;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

int run_self_check(std::ostream& out) {
  CheckReporter check{out};
  RngStream rng(20240117, 0);

  {
    const ParticleStore store = random_store(rng, 200, 3);
    const MatrixXd h = random_matrix(rng, 200, 8);
    const double alpha = 2.5;
    VectorXd beta(8);
    for (Eigen::Index j = 0; j < 8; ++j) beta[j] = rng.standard_normal();
    const VectorXd g = ((h * beta).array() + alpha).matrix();
    const double est = aiscv_fit(store, h, g).scalar();
    check.report("exactness-on-planted-integrand", std::abs(est - alpha) <= 1e-10 * (1.0 + std::abs(alpha)),
                 "estimate " + format_double(est) + " vs " + format_double(alpha));
  }

  {
    const ParticleStore store = random_store(rng, 150, 3);
    const MatrixXd h = random_matrix(rng, 150, 5);
    VectorXd g(150);
    for (Eigen::Index i = 0; i < 150; ++i) g[i] = rng.uniform() * 3.0;
    const double fit = aiscv_fit(store, h, g).scalar();
    const double quad = quadrature_apply(build_quadrature(store, h), g);
    const double oracle = matrix_form_oracle(store, h, g);
    check.report("fit-quadrature-oracle-equivalence",
                 close_rel(fit, quad, 1e-10) && close_rel(fit, oracle, 1e-10),
                 "fit " + format_double(fit) + ", quadrature " + format_double(quad) +
                     ", oracle " + format_double(oracle));
  }

  {
    const ParticleStore store = random_store(rng, 150, 3);
    const MatrixXd h = random_matrix(rng, 150, 5);
    VectorXd g(150);
    for (Eigen::Index i = 0; i < 150; ++i) g[i] = std::sin(3.0 * rng.uniform());
    MatrixXd a = MatrixXd::Identity(5, 5) + 0.1 * random_matrix(rng, 5, 5);
    const auto [base, transformed] = invariance_check(store, h, a, g);
    check.report("invariance-under-basis-transform",
                 close_rel(base.scalar(), transformed.scalar(), 1e-8),
                 format_double(base.scalar()) + " vs " + format_double(transformed.scalar()));
  }

  {
    const ParticleStore store = random_store(rng, 120, 2);
    const MatrixXd h = random_matrix(rng, 120, 4);
    const QuadratureRule rule = build_quadrature(store, h);
    check.report("quadrature-weights-sum-to-one",
                 std::abs(rule.quad_weights.sum() - 1.0) <= 1e-12,
                 format_double(rule.quad_weights.sum()));
  }

  {
    const Eigen::Index n = 150;
    ParticleStore store = random_store(rng, n, 3);
    const MatrixXd h = random_matrix(rng, n, 5);
    VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.uniform();
    ParticleStore scaled(3);
    scaled.append_stage(store.points(), VectorXd(store.weights() * 3.7e5));
    const double base_fit = aiscv_fit(store, h, g).scalar();
    const double scaled_fit = aiscv_fit(scaled, h, g).scalar();
    const double base_ais = ais_estimate(store, g).scalar();
    const double scaled_ais = ais_estimate(scaled, g).scalar();
    check.report("weight-scale-invariance",
                 close_rel(base_fit, scaled_fit, 1e-12) && close_rel(base_ais, scaled_ais, 1e-12));
  }

  {
    const ParticleStore store = random_store(rng, 80, 2);
    VectorXd g(80);
    for (Eigen::Index i = 0; i < 80; ++i) g[i] = rng.uniform();
    const MatrixXd empty(80, 0);
    const double cv = aiscv_fit(store, empty, g).scalar();
    const double ais = ais_estimate(store, g).scalar();
    check.report("empty-basis-reduces-to-importance-sampling", cv == ais,
                 format_double(cv) + " vs " + format_double(ais));
  }

  {
    const ControlBasis basis = legendre_pairs_basis(3, 3);
    const StudentTPolicy reference = StudentTPolicy::from_covariance(
        VectorXd::Constant(3, 0.5), 0.08 * MatrixXd::Identity(3, 3), 8.0);
    const Target target = uniform_cube_target(3);
    const VectorXd z =
        weighted_zero_mean_check(basis, nullptr, target.log_density_unnormalized, reference,
                                 20000, rng);
    check.report("legendre-columns-mean-zero-on-cube", z.cwiseAbs().maxCoeff() < 5.0,
                 "max |z| = " + format_double(z.cwiseAbs().maxCoeff()));
  }

  {
    const ControlBasis basis = stein_monomial_basis(3, 2);
    const Target target = gaussian_mixture_target(3, MixtureVariant::Isotropic);
    const StudentTPolicy reference = StudentTPolicy::from_covariance(
        VectorXd::Zero(3), (5.0 / 3.0) * MatrixXd::Identity(3, 3), 8.0);
    const VectorXd z = weighted_zero_mean_check(basis, &*target.score,
                                                target.log_density_unnormalized, reference,
                                                20000, rng);
    check.report("stein-columns-mean-zero-on-mixture", z.cwiseAbs().maxCoeff() < 5.0,
                 "max |z| = " + format_double(z.cwiseAbs().maxCoeff()));
  }

  {
    ExperimentSpec spec;
    spec.family = Family::Cube;
    spec.dimension = 2;
    spec.stages = 3;
    spec.per_stage = 50;
    spec.replications = 1;
    spec.checkpoints = {3};
    spec.basis = {true, BasisKind::LegendrePairs, 2};
    spec.base_seed = 7;
    const ReplicationRecord a = run_replication(spec, 0);
    const ReplicationRecord b = run_replication(spec, 0);
    bool same = a.checkpoints.size() == b.checkpoints.size() && !a.failed && !b.failed;
    for (std::size_t i = 0; same && i < a.checkpoints.size(); ++i)
      same = a.checkpoints[i].ais == b.checkpoints[i].ais &&
             a.checkpoints[i].aiscv == b.checkpoints[i].aiscv;
    check.report("replication-determinism", same);
  }

  out << (check.failures == 0 ? "all checks passed" : std::to_string(check.failures) + " check(s) failed")
      << '\n';
  return check.failures;
}

}  // namespace aiscv
