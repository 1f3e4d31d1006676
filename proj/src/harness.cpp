#include "aiscv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace aiscv {

namespace {

constexpr const char* kVersionString = "aiscv 0.1.0";

std::vector<int> normalized_checkpoints(const ExperimentSpec& spec) {
  std::vector<int> marks = spec.checkpoints;
  marks.erase(std::remove_if(marks.begin(), marks.end(),
                             [&](int c) { return c > spec.stages; }),
              marks.end());
  marks.push_back(spec.stages);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  return marks;
}

void validate_common(const ExperimentSpec& spec) {
  if (spec.stages < 1) throw ConfigError("stages must be >= 1");
  if (spec.per_stage < 1) throw ConfigError("per_stage must be >= 1");
  if (spec.replications < 1) throw ConfigError("replications must be >= 1");
  for (int c : spec.checkpoints)
    if (c < 1) throw ConfigError("checkpoint stages must be >= 1");
  if (spec.policy.defensive_eta < 0.0 || spec.policy.defensive_eta >= 1.0)
    throw ConfigError("defensive eta must lie in [0, 1)");
  if (spec.policy.dof && !(*spec.policy.dof > 2.0))
    throw ConfigError("policy dof must exceed 2");
  if (spec.policy.sigma0 && !(*spec.policy.sigma0 > 0.0))
    throw ConfigError("sigma0 must be positive");
  if (spec.basis.enabled && spec.basis.degree < 1)
    throw ConfigError("basis degree must be >= 1");
}

VectorXd resolve_initial_mean(const PolicyConfig& policy, Eigen::Index d,
                              const VectorXd& fallback) {
  if (!policy.initial_mean) return fallback;
  if (policy.initial_mean->size() != d)
    throw ConfigError("initial_mean has " + std::to_string(policy.initial_mean->size()) +
                      " entries, expected " + std::to_string(d));
  return *policy.initial_mean;
}

std::optional<ControlBasis> resolve_basis(const ExperimentSpec& spec, Eigen::Index d,
                                          bool target_has_score) {
  if (!spec.basis.enabled) return std::nullopt;
  if (spec.basis.kind == BasisKind::SteinMonomials) {
    if (!target_has_score)
      throw ConfigError("a Stein basis needs the target's score, which this target lacks");
    return stein_monomial_basis(d, spec.basis.degree);
  }
  return legendre_pairs_basis(d, spec.basis.degree);
}

ExperimentContext make_cube_context(const ExperimentSpec& spec) {
  if (spec.dimension < 1) throw ConfigError("dimension must be >= 1");
  const Eigen::Index d = spec.dimension;
  ExperimentContext ctx;
  ctx.target = uniform_cube_target(d);
  ctx.basis = resolve_basis(spec, d, false);

  std::vector<Integrand> all = cube_integrands(d);
  std::vector<Integrand> chosen;
  if (spec.integrands.empty()) {
    chosen = all;
  } else {
    for (const std::string& name : spec.integrands) {
      const auto it = std::find_if(all.begin(), all.end(),
                                   [&](const Integrand& g) { return g.label == name; });
      if (it == all.end()) throw ConfigError("unknown cube integrand '" + name + "'");
      chosen.push_back(*it);
    }
  }
  ctx.ground_truth.resize(static_cast<Eigen::Index>(chosen.size()));
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    ctx.labels.push_back(chosen[j].label);
    ctx.ground_truth[static_cast<Eigen::Index>(j)] = chosen[j].ground_truth;
  }
  ctx.integrand_matrix = [chosen](const MatrixXd& pts) {
    MatrixXd g(pts.rows(), static_cast<Eigen::Index>(chosen.size()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const VectorXd x = pts.row(i).transpose();
      for (std::size_t j = 0; j < chosen.size(); ++j)
        g(i, static_cast<Eigen::Index>(j)) = chosen[j].eval(x);
    }
    return g;
  };

  const double sigma0 = spec.policy.sigma0.value_or(0.1);
  const double dof = spec.policy.dof.value_or(8.0);
  const VectorXd mean =
      resolve_initial_mean(spec.policy, d, VectorXd::Constant(d, 0.5));
  ctx.initial_policy = StudentTPolicy::from_covariance(
      mean, sigma0 * MatrixXd::Identity(d, d), dof);
  ctx.notes.push_back("policy: student-t dof=" + format_double(dof) +
                      ", initial covariance sigma0*I with sigma0=" + format_double(sigma0));
  return ctx;
}

ExperimentContext make_mixture_context(const ExperimentSpec& spec) {
  if (spec.dimension < 1) throw ConfigError("dimension must be >= 1");
  const Eigen::Index d = spec.dimension;
  ExperimentContext ctx;
  ctx.target = gaussian_mixture_target(d, spec.mixture_variant);
  ctx.basis = resolve_basis(spec, d, true);

  ctx.ground_truth = gaussian_mixture_mean(d, spec.mixture_variant);
  for (Eigen::Index j = 0; j < d; ++j) ctx.labels.push_back("x" + std::to_string(j + 1));
  ctx.aggregate_label = "x";
  ctx.integrand_matrix = [](const MatrixXd& pts) { return pts; };

  const double sigma0 = spec.policy.sigma0.value_or(5.0);
  const double dof = spec.policy.dof.value_or(8.0);
  VectorXd mean0 = VectorXd::Zero(d);
  mean0[0] = 1.0;
  if (d > 1) mean0[1] = -1.0;
  mean0 /= std::sqrt(static_cast<double>(d));
  const VectorXd mean = resolve_initial_mean(spec.policy, d, mean0);
  ctx.initial_policy = StudentTPolicy::from_covariance(
      mean, (sigma0 / static_cast<double>(d)) * MatrixXd::Identity(d, d), dof);
  ctx.notes.push_back("policy: student-t dof=" + format_double(dof) +
                      ", initial covariance (sigma0/d)*I with sigma0=" + format_double(sigma0));
  return ctx;
}

ExperimentContext make_blr_context(const ExperimentSpec& spec) {
  if (spec.dataset_path.empty()) throw ConfigError("blr experiments need a dataset path");
  if (!(spec.blr_noise_sigma > 0.0)) throw ConfigError("noise sigma must be positive");
  if (!(spec.blr_prior_scale > 0.0)) throw ConfigError("prior scale must be positive");

  const IngestResult data =
      ingest_csv(spec.dataset_path, spec.target_column, spec.delimiter, spec.categorical);
  const Eigen::Index d = data.features.cols();

  const VectorXd prior_mean = VectorXd::Zero(d);
  const MatrixXd prior_cov = spec.blr_prior_scale * MatrixXd::Identity(d, d);
  const BlrPosterior post = blr_posterior(data.features, data.response, spec.blr_noise_sigma,
                                          prior_mean, prior_cov);

  ExperimentContext ctx;
  ctx.target = post.target();
  ctx.basis = resolve_basis(spec, d, true);
  ctx.labels.push_back("theta_sq");
  ctx.ground_truth = VectorXd::Constant(1, post.squared_norm_ground_truth());
  ctx.relative_error = true;
  ctx.integrand_matrix = [](const MatrixXd& pts) {
    return MatrixXd(pts.rowwise().squaredNorm());
  };

  const double sigma0 = spec.policy.sigma0.value_or(1.0);
  const double dof = spec.policy.dof.value_or(10.0);
  const VectorXd mean = resolve_initial_mean(spec.policy, d, VectorXd::Zero(d));
  ctx.initial_policy =
      StudentTPolicy::from_covariance(mean, sigma0 * post.posterior_cov, dof);
  ctx.notes.push_back("dataset: " + spec.dataset_path + " (N=" +
                      std::to_string(data.features.rows()) + ", d=" + std::to_string(d) + ")");
  ctx.notes.push_back("prior: mean 0, covariance " + format_double(spec.blr_prior_scale) +
                      "*I; noise sigma " + format_double(spec.blr_noise_sigma));
  ctx.notes.push_back("policy: student-t dof=" + format_double(dof) +
                      ", initial covariance sigma0*posterior_cov with sigma0=" +
                      format_double(sigma0));
  return ctx;
}

StudentTPolicy adapt_policy(const StudentTPolicy& policy, VectorXd mean) {
  return policy.with_mean(std::move(mean));
}

MixturePolicy adapt_policy(const MixturePolicy& policy, VectorXd mean) {
  return policy.with_adaptive_mean(std::move(mean));
}

struct StageOutput {
  ParticleStore store;
  MatrixXd controls;
  StageOutput(Eigen::Index d, Eigen::Index n, Eigen::Index m) : store(d), controls(n, m) {}
};

template <typename Policy>
StageOutput run_stages(const ExperimentSpec& spec, const ExperimentContext& ctx, Policy policy,
                       RngStream& rng, const std::vector<int>& marks, ReplicationRecord* rec) {
  const Eigen::Index d = ctx.initial_policy->dimension();
  const Eigen::Index m = ctx.basis ? ctx.basis->size() : 0;
  const Eigen::Index p = ctx.ground_truth.size();
  const Eigen::Index n_total =
      static_cast<Eigen::Index>(spec.stages) * static_cast<Eigen::Index>(spec.per_stage);
  const ScoreFunction* score =
      ctx.basis && ctx.basis->kind() == BasisKind::SteinMonomials ? &*ctx.target.score : nullptr;

  StageOutput out(d, n_total, m);
  MatrixXd integrand_values(n_total, p);
  GmmAccumulator acc(d);
  Eigen::Index filled = 0;

  for (int t = 1; t <= spec.stages; ++t) {
    const MatrixXd pts = policy.sample(spec.per_stage, rng);
    VectorXd w(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const VectorXd x = pts.row(i).transpose();
      const double log_f = ctx.target.log_density_unnormalized(x);
      w[i] = log_f == -std::numeric_limits<double>::infinity()
                 ? 0.0
                 : std::exp(log_f - policy.log_density(x));
    }
    out.store.append_stage(pts, w);
    if (m > 0) out.controls.middleRows(filled, pts.rows()) = evaluate_basis(*ctx.basis, pts, score);
    integrand_values.middleRows(filled, pts.rows()) = ctx.integrand_matrix(pts);
    filled += pts.rows();

    acc.fold(pts, w);
    // A stage with no mass in the target support leaves the policy where it
    // was; adaptation resumes once some weight arrives.
    if (acc.weight_sum() > 0.0) policy = adapt_policy(policy, acc.mean());

    if (rec != nullptr && std::binary_search(marks.begin(), marks.end(), t)) {
      CheckpointEstimates ck;
      ck.stage = t;
      ck.particles = filled;
      ck.ais = ais_estimate(out.store, MatrixXd(integrand_values.topRows(filled))).value;
      const QuadratureRule rule =
          build_quadrature(out.store, MatrixXd(out.controls.topRows(filled)));
      ck.aiscv = quadrature_apply(rule, MatrixXd(integrand_values.topRows(filled)));
      rec->checkpoints.push_back(std::move(ck));
    }
  }
  return out;
}

template <typename Policy>
StageOutput dispatch_run(const ExperimentSpec& spec, const ExperimentContext& ctx, Policy policy,
                         int stream_id, const std::vector<int>& marks, ReplicationRecord* rec) {
  RngStream rng(spec.base_seed, static_cast<std::uint64_t>(stream_id));
  return run_stages(spec, ctx, std::move(policy), rng, marks, rec);
}

StageOutput run_any(const ExperimentSpec& spec, const ExperimentContext& ctx, int stream_id,
                    const std::vector<int>& marks, ReplicationRecord* rec) {
  if (ctx.defensive_eta > 0.0)
    return dispatch_run(spec, ctx,
                        MixturePolicy(*ctx.initial_policy, *ctx.initial_policy, ctx.defensive_eta),
                        stream_id, marks, rec);
  return dispatch_run(spec, ctx, *ctx.initial_policy, stream_id, marks, rec);
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::Cube: return "cube";
    case Family::Mixture: return "mixture";
    case Family::Blr: return "blr";
  }
  return "?";
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

std::string to_string(BasisKind kind) {
  return kind == BasisKind::LegendrePairs ? "legendre" : "stein";
}

std::string to_string(MixtureVariant variant) {
  return variant == MixtureVariant::Isotropic ? "isotropic" : "anisotropic";
}

std::string to_string(CategoricalHandling handling) {
  return handling == CategoricalHandling::Drop ? "drop" : "encode";
}

ExperimentContext make_context(const ExperimentSpec& spec) {
  validate_common(spec);
  ExperimentContext ctx;
  switch (spec.family) {
    case Family::Cube: ctx = make_cube_context(spec); break;
    case Family::Mixture: ctx = make_mixture_context(spec); break;
    case Family::Blr: ctx = make_blr_context(spec); break;
  }
  ctx.defensive_eta = spec.policy.defensive_eta;
  if (ctx.defensive_eta > 0.0)
    ctx.notes.push_back("defensive mixture eta=" + format_double(ctx.defensive_eta));
  if (ctx.basis)
    ctx.notes.push_back("basis: " + to_string(ctx.basis->kind()) + " degree " +
                        std::to_string(ctx.basis->max_degree()) + ", m=" +
                        std::to_string(ctx.basis->size()));
  else
    ctx.notes.push_back("basis: none (m=0, both methods reduce to importance sampling)");
  return ctx;
}

ReplicationRecord run_replication(const ExperimentSpec& spec, const ExperimentContext& ctx,
                                  int stream_id) {
  ReplicationRecord rec;
  rec.stream_id = stream_id;
  const std::vector<int> marks = normalized_checkpoints(spec);
  try {
    run_any(spec, ctx, stream_id, marks, &rec);
  } catch (const DegenerateQuadrature& e) {
    rec.failed = true;
    rec.failure_reason = e.what();
  } catch (const ZeroWeightSum& e) {
    rec.failed = true;
    rec.failure_reason = e.what();
  }
  return rec;
}

ReplicationRecord run_replication(const ExperimentSpec& spec, int stream_id) {
  return run_replication(spec, make_context(spec), stream_id);
}

std::pair<ParticleStore, MatrixXd> run_particles(const ExperimentSpec& spec, int stream_id) {
  const ExperimentContext ctx = make_context(spec);
  StageOutput out = run_any(spec, ctx, stream_id, {}, nullptr);
  return {std::move(out.store), std::move(out.controls)};
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentContext ctx = make_context(spec);
  const int r = spec.replications;

  int nthreads = spec.threads > 0
                     ? spec.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::clamp(nthreads, 1, r);

  std::vector<ReplicationRecord> recs(static_cast<std::size_t>(r));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> worker_errors(static_cast<std::size_t>(nthreads));
  auto worker = [&](int slot) {
    try {
      for (int i = next.fetch_add(1); i < r; i = next.fetch_add(1))
        recs[static_cast<std::size_t>(i)] = run_replication(spec, ctx, i);
    } catch (...) {
      worker_errors[static_cast<std::size_t>(slot)] = std::current_exception();
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int s = 0; s < nthreads; ++s) pool.emplace_back(worker, s);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& err : worker_errors)
    if (err) std::rethrow_exception(err);

  ExperimentResult result;
  result.spec = spec;
  result.integrand_labels = ctx.labels;
  result.ground_truth = ctx.ground_truth;
  result.replications = std::move(recs);
  result.version = kVersionString;
  result.notes = ctx.notes;
  result.notes.push_back("threads: " + std::to_string(nthreads));

  for (const ReplicationRecord& rec : result.replications)
    if (rec.failed) ++result.failed_replications;
  if (result.failed_replications * 10 > r)
    throw NumericalFailure(std::to_string(result.failed_replications) + " of " +
                           std::to_string(r) + " replications failed; first reason: " +
                           [&]() -> std::string {
                             for (const auto& rec : result.replications)
                               if (rec.failed) return rec.failure_reason;
                             return "unknown";
                           }());

  // MSE per (checkpoint, method, component) over the successful replications,
  // plus an aggregate row summing the components of vector integrands.
  const std::vector<int> marks = normalized_checkpoints(spec);
  const Eigen::Index p = ctx.ground_truth.size();
  const int used = r - result.failed_replications;
  for (std::size_t ci = 0; ci < marks.size(); ++ci) {
    for (const char* method : {"ais", "aiscv"}) {
      VectorXd mse = VectorXd::Zero(p);
      double aggregate = 0.0;
      for (const ReplicationRecord& rec : result.replications) {
        if (rec.failed) continue;
        const CheckpointEstimates& ck = rec.checkpoints.at(ci);
        const VectorXd& est = std::string(method) == "ais" ? ck.ais : ck.aiscv;
        for (Eigen::Index j = 0; j < p; ++j) {
          double e = est[j] - ctx.ground_truth[j];
          if (ctx.relative_error) e /= ctx.ground_truth[j];
          mse[j] += e * e;
          aggregate += e * e;
        }
      }
      if (used > 0) {
        mse /= used;
        aggregate /= used;
      }
      const Eigen::Index particles =
          static_cast<Eigen::Index>(marks[ci]) * static_cast<Eigen::Index>(spec.per_stage);
      for (Eigen::Index j = 0; j < p; ++j)
        result.summary.push_back({method, ctx.labels[static_cast<std::size_t>(j)], particles,
                                  mse[j], used});
      if (!ctx.aggregate_label.empty())
        result.summary.push_back({method, ctx.aggregate_label, particles, aggregate, used});
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  result.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return result;
}

}  // namespace aiscv
