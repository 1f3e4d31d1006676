#pragma once

#include "aiscv/control_variates.hpp"
#include "aiscv/core.hpp"
#include "aiscv/estimator.hpp"
#include "aiscv/policies.hpp"
#include "aiscv/targets.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aiscv {

// Invalid configuration (unknown keys, unparsable values, missing inputs);
// the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Too many replications failed numerically; the CLI maps this to exit code 3.
struct NumericalFailure : std::runtime_error {
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// A cell of a dataset failed to parse; line and column are 1-based.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line_no, std::size_t column_no)
      : std::runtime_error(what), line(line_no), column(column_no) {}
  std::size_t line;
  std::size_t column;
};

struct EmptyDataset : std::runtime_error {
  explicit EmptyDataset(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class Family { Cube, Mixture, Blr };
enum class OutputFormat { Csv, Json };
enum class CategoricalHandling { Drop, Encode };

// Control-variate configuration; enabled=false runs with m = 0, in which case
// the regression route degenerates to plain importance sampling.
struct BasisConfig {
  bool enabled = true;
  BasisKind kind = BasisKind::LegendrePairs;
  int degree = 6;  // k for Legendre pairs, Q for Stein monomials
};

// Sampling-policy configuration. Unset optionals fall back to per-family
// defaults: dof 8 (cube, mixture) or 10 (blr); initial covariance
// sigma0 * I with sigma0 = 0.1 (cube), (sigma0/d) * I with sigma0 = 5
// (mixture), or sigma0 * posterior covariance with sigma0 = 1 (blr);
// initial mean (0.5,...,0.5) (cube), (1,-1,0,...,0)/sqrt(d) (mixture),
// or 0 (blr). defensive_eta > 0 mixes the adapted policy with the fixed
// initial one at that weight.
struct PolicyConfig {
  std::optional<double> dof;
  std::optional<double> sigma0;
  std::optional<VectorXd> initial_mean;
  double defensive_eta = 0.0;
};

struct ExperimentSpec {
  Family family = Family::Cube;
  Eigen::Index dimension = 4;
  int stages = 20;
  int per_stage = 1000;
  int replications = 20;
  // Stage counts at which estimates are recorded; the final stage is always
  // included. Default {5, 10, 20} traces an error-versus-n curve in one run.
  std::vector<int> checkpoints = {5, 10, 20};
  PolicyConfig policy;
  BasisConfig basis;
  // Cube only: subset of {g1, g2, g3}; empty means all three.
  std::vector<std::string> integrands;
  MixtureVariant mixture_variant = MixtureVariant::Anisotropic;
  std::string dataset_path;    // blr only
  std::string target_column;   // name or 0-based index; empty means last column
  char delimiter = ',';
  CategoricalHandling categorical = CategoricalHandling::Drop;
  double blr_noise_sigma = 50.0;
  double blr_prior_scale = 100.0;  // prior covariance = scale * I
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 = one per hardware thread, capped at R
};

// Everything derived from the spec that is shared across replications:
// target, integrand block evaluator, basis, and the initial policy.
struct ExperimentContext {
  Target target;
  std::optional<ControlBasis> basis;
  std::optional<StudentTPolicy> initial_policy;  // set by make_context
  double defensive_eta = 0.0;
  std::function<MatrixXd(const MatrixXd&)> integrand_matrix;  // points -> n x p values
  VectorXd ground_truth;            // p
  std::vector<std::string> labels;  // p scalar component labels
  // Squared errors enter the MSE either raw or relative to the truth.
  bool relative_error = false;
  // When set, an extra summary row aggregates the squared errors of all
  // components (vector-valued integrands).
  std::string aggregate_label;
  std::vector<std::string> notes;
};

struct CheckpointEstimates {
  int stage = 0;
  Eigen::Index particles = 0;
  VectorXd ais;    // per integrand component
  VectorXd aiscv;  // per integrand component
};

struct ReplicationRecord {
  int stream_id = 0;
  bool failed = false;
  std::string failure_reason;
  std::vector<CheckpointEstimates> checkpoints;
};

struct MseRow {
  std::string method;     // "ais" or "aiscv"
  std::string integrand;  // component label, or the aggregate label
  Eigen::Index particles = 0;
  double mse = 0.0;
  int replications_used = 0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<std::string> integrand_labels;
  VectorXd ground_truth;
  std::vector<ReplicationRecord> replications;
  std::vector<MseRow> summary;
  int failed_replications = 0;
  double wall_time_ms = 0.0;
  std::string version;
  std::vector<std::string> notes;
};

// Result of loading a regression dataset from CSV.
struct IngestResult {
  MatrixXd features;
  VectorXd response;
  std::vector<std::string> feature_names;
  std::string response_name;
  std::vector<std::string> dropped_columns;
};

ExperimentContext make_context(const ExperimentSpec& spec);

// One full adaptive run: T stages of sampling from the current policy,
// importance weighting against the target, accumulator fold and mean update;
// AIS and quadrature estimates are recorded at every checkpoint stage.
// Degenerate quadrature or a zero weight sum marks the replication failed
// instead of throwing.
ReplicationRecord run_replication(const ExperimentSpec& spec, const ExperimentContext& ctx,
                                  int stream_id);
ReplicationRecord run_replication(const ExperimentSpec& spec, int stream_id);

// Runs replications 0..R-1 (in parallel when allowed), aggregates the MSE per
// method, integrand and checkpoint over the successful replications, and
// throws NumericalFailure when more than 10% of replications failed.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Full particle set and control matrix of one replication, for exporting the
// integrand-independent quadrature rule.
std::pair<ParticleStore, MatrixXd> run_particles(const ExperimentSpec& spec, int stream_id);

// Loads a numeric CSV. Header row is auto-detected. A column whose cells
// never parse as numbers is categorical and is dropped or label-encoded per
// `categorical`; a column with some numeric and some non-numeric cells raises
// ParseError at the first bad cell. The target column may be given by header
// name or 0-based index; empty selects the last column.
IngestResult ingest_csv(const std::string& path, const std::string& target_column,
                        char delimiter = ',',
                        CategoricalHandling categorical = CategoricalHandling::Drop);

// Writes the experiment result. Csv writes the per-replication detail table
// to `path` and a companion summary table (method x n -> MSE) next to it with
// an `_summary` suffix; Json writes a single self-contained document.
void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path);

// Reloads a JSON result document, reproducing every estimate bit-exact.
ExperimentResult read_results_json(const std::string& path);

// Flat key=value config file ('#' comments); unknown keys are rejected when
// the map is turned into a spec.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Builds a spec from string key-value pairs layered on top of `base`.
// Throws ConfigError on unknown keys or unparsable values.
ExperimentSpec spec_from_keyvalues(const std::map<std::string, std::string>& kv,
                                   const ExperimentSpec& base = ExperimentSpec{});

// Small self-contained property suite (exactness, route equivalence,
// invariance, normalization, determinism) on small instances; prints one line
// per property to `out` and returns the number of failures.
int run_self_check(std::ostream& out);

std::string to_string(Family family);
std::string to_string(OutputFormat format);
std::string to_string(BasisKind kind);
std::string to_string(MixtureVariant variant);
std::string to_string(CategoricalHandling handling);

}  // namespace aiscv
