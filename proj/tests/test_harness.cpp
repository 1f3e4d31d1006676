#include "aiscv/harness.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using aiscv::BasisKind;
using aiscv::CategoricalHandling;
using aiscv::ConfigError;
using aiscv::EmptyDataset;
using aiscv::ExperimentContext;
using aiscv::ExperimentResult;
using aiscv::ExperimentSpec;
using aiscv::Family;
using aiscv::IngestResult;
using aiscv::MseRow;
using aiscv::NumericalFailure;
using aiscv::OutputFormat;
using aiscv::ParseError;
using aiscv::ReplicationRecord;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

namespace fs = std::filesystem;

std::string housing_path() { return std::string(AISCV_SOURCE_DIR) + "/data/housing.csv"; }

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("aiscv_test_" + std::to_string(::getpid()) + "_" + name);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentSpec small_cube_spec() {
  ExperimentSpec spec;
  spec.family = Family::Cube;
  spec.dimension = 2;
  spec.stages = 3;
  spec.per_stage = 60;
  spec.replications = 3;
  spec.checkpoints = {2, 3};
  spec.basis.kind = BasisKind::LegendrePairs;
  spec.basis.degree = 2;
  spec.base_seed = 91;
  spec.threads = 1;
  return spec;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AISCV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const MseRow& find_row(const ExperimentResult& result, const std::string& method,
                       const std::string& integrand, Eigen::Index particles) {
  for (const MseRow& row : result.summary) {
    if (row.method == method && row.integrand == integrand && row.particles == particles)
      return row;
  }
  REQUIRE_MESSAGE(false, ("summary row not found: " + method + "/" + integrand));
  static MseRow dummy;
  return dummy;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("contexts carry the per-family wiring") {
  ExperimentSpec cube = small_cube_spec();
  const ExperimentContext cctx = aiscv::make_context(cube);
  CHECK(cctx.target.label == "uniform-cube");
  CHECK(cctx.labels == std::vector<std::string>{"g1", "g2", "g3"});
  CHECK((cctx.ground_truth.array() == 1.0).all());
  CHECK_FALSE(cctx.relative_error);
  REQUIRE(cctx.basis.has_value());
  CHECK(cctx.basis->kind() == BasisKind::LegendrePairs);
  REQUIRE(cctx.initial_policy.has_value());
  CHECK((cctx.initial_policy->mean().array() == 0.5).all());

  ExperimentSpec mix = small_cube_spec();
  mix.family = Family::Mixture;
  mix.dimension = 3;
  mix.basis.kind = BasisKind::SteinMonomials;
  mix.basis.degree = 2;
  const ExperimentContext mctx = aiscv::make_context(mix);
  CHECK(mctx.labels == std::vector<std::string>{"x1", "x2", "x3"});
  CHECK(mctx.aggregate_label == "x");
  CHECK(mctx.target.label == "gaussian-mixture-anisotropic");

  ExperimentSpec blr = small_cube_spec();
  blr.family = Family::Blr;
  blr.dataset_path = housing_path();
  blr.basis.kind = BasisKind::SteinMonomials;
  blr.basis.degree = 1;
  const ExperimentContext bctx = aiscv::make_context(blr);
  CHECK(bctx.relative_error);
  CHECK(bctx.labels == std::vector<std::string>{"theta_sq"});
  CHECK(bctx.target.dimension == 13);
}

TEST_CASE("invalid specs are rejected up front") {
  ExperimentSpec spec = small_cube_spec();
  spec.stages = 0;
  CHECK_THROWS_AS(aiscv::make_context(spec), ConfigError);
  spec = small_cube_spec();
  spec.policy.defensive_eta = 1.0;
  CHECK_THROWS_AS(aiscv::make_context(spec), ConfigError);
  spec = small_cube_spec();
  spec.policy.dof = 2.0;
  CHECK_THROWS_AS(aiscv::make_context(spec), ConfigError);
  spec = small_cube_spec();
  spec.basis.degree = 0;
  CHECK_THROWS_AS(aiscv::make_context(spec), ConfigError);
  spec = small_cube_spec();
  spec.family = Family::Blr;
  spec.dataset_path.clear();
  CHECK_THROWS_AS(aiscv::make_context(spec), ConfigError);
  // A Stein basis on the cube has no score to work with.
  spec = small_cube_spec();
  spec.basis.kind = BasisKind::SteinMonomials;
  CHECK_THROWS_AS(aiscv::make_context(spec), ConfigError);
}

TEST_CASE("without controls both methods coincide replication by replication") {
  ExperimentSpec spec = small_cube_spec();
  spec.basis.enabled = false;
  const ReplicationRecord rec = aiscv::run_replication(spec, 0);
  REQUIRE_FALSE(rec.failed);
  REQUIRE(rec.checkpoints.size() == 2);
  for (const auto& ck : rec.checkpoints) {
    // The two routes normalize in a different order, so agreement is up to
    // rounding, not bit-exact.
    CHECK((ck.ais - ck.aiscv).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(ck.ais.size() == 3);
  }
}

TEST_CASE("a planted linear integrand is recovered almost exactly at every checkpoint") {
  ExperimentSpec spec = small_cube_spec();
  spec.per_stage = 80;
  const ExperimentContext base = aiscv::make_context(spec);
  REQUIRE(base.basis.has_value());

  ExperimentContext planted = base;
  const double alpha = 3.25;
  VectorXd beta(base.basis->size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = 0.3 * (j % 5) - 0.6;
  planted.integrand_matrix = [basis = *base.basis, alpha, beta](const MatrixXd& pts) {
    return MatrixXd(((aiscv::evaluate_basis(basis, pts) * beta).array() + alpha).matrix());
  };
  planted.ground_truth = VectorXd::Constant(1, alpha);
  planted.labels = {"planted"};

  const ReplicationRecord rec = aiscv::run_replication(spec, planted, 0);
  REQUIRE_FALSE(rec.failed);
  for (const auto& ck : rec.checkpoints) {
    CHECK(std::abs(ck.aiscv(0) - alpha) <= 1e-8);
    // Importance sampling alone carries real monte carlo noise here, which is
    // exactly the gap the regression removes.
    CHECK(std::abs(ck.ais(0) - alpha) > 1e-6);
  }
}

TEST_CASE("experiments are bit-for-bit deterministic") {
  const ExperimentSpec spec = small_cube_spec();
  const ExperimentResult a = aiscv::run_experiment(spec);
  const ExperimentResult b = aiscv::run_experiment(spec);
  REQUIRE(a.replications.size() == b.replications.size());
  for (std::size_t r = 0; r < a.replications.size(); ++r) {
    REQUIRE(a.replications[r].checkpoints.size() == b.replications[r].checkpoints.size());
    for (std::size_t c = 0; c < a.replications[r].checkpoints.size(); ++c) {
      CHECK(a.replications[r].checkpoints[c].ais == b.replications[r].checkpoints[c].ais);
      CHECK(a.replications[r].checkpoints[c].aiscv == b.replications[r].checkpoints[c].aiscv);
    }
  }

  const fs::path fa = temp_file("det_a.csv"), fb = temp_file("det_b.csv");
  aiscv::emit_results(a, OutputFormat::Csv, fa.string());
  aiscv::emit_results(b, OutputFormat::Csv, fb.string());
  CHECK(read_file(fa) == read_file(fb));
  CHECK(read_file(temp_file("det_a_summary.csv")) == read_file(temp_file("det_b_summary.csv")));
  for (const char* n : {"det_a.csv", "det_b.csv", "det_a_summary.csv", "det_b_summary.csv"})
    fs::remove(temp_file(n));
}

TEST_CASE("threading does not change the results") {
  ExperimentSpec spec = small_cube_spec();
  spec.replications = 4;
  spec.threads = 1;
  const ExperimentResult serial = aiscv::run_experiment(spec);
  spec.threads = 4;
  const ExperimentResult parallel = aiscv::run_experiment(spec);
  for (std::size_t r = 0; r < serial.replications.size(); ++r)
    for (std::size_t c = 0; c < serial.replications[r].checkpoints.size(); ++c) {
      CHECK(serial.replications[r].checkpoints[c].ais ==
            parallel.replications[r].checkpoints[c].ais);
      CHECK(serial.replications[r].checkpoints[c].aiscv ==
            parallel.replications[r].checkpoints[c].aiscv);
    }
}

TEST_CASE("a shorter run is a prefix of a longer one") {
  ExperimentSpec long_spec = small_cube_spec();
  long_spec.stages = 10;
  long_spec.checkpoints = {4, 10};
  ExperimentSpec short_spec = long_spec;
  short_spec.stages = 4;
  short_spec.checkpoints = {4};
  const ReplicationRecord full = aiscv::run_replication(long_spec, 2);
  const ReplicationRecord head = aiscv::run_replication(short_spec, 2);
  REQUIRE_FALSE(full.failed);
  REQUIRE_FALSE(head.failed);
  REQUIRE(full.checkpoints.size() == 2);
  REQUIRE(head.checkpoints.size() == 1);
  CHECK(full.checkpoints[0].stage == 4);
  CHECK(full.checkpoints[0].ais == head.checkpoints[0].ais);
  CHECK(full.checkpoints[0].aiscv == head.checkpoints[0].aiscv);
}

TEST_CASE("checkpoints are normalized to valid sorted stages") {
  ExperimentSpec spec = small_cube_spec();
  spec.stages = 5;
  spec.checkpoints = {50, 3};
  const ReplicationRecord rec = aiscv::run_replication(spec, 0);
  REQUIRE(rec.checkpoints.size() == 2);
  CHECK(rec.checkpoints[0].stage == 3);
  CHECK(rec.checkpoints[1].stage == 5);
  CHECK(rec.checkpoints[0].particles == 3 * spec.per_stage);
  CHECK(rec.checkpoints[1].particles == 5 * spec.per_stage);
}

TEST_CASE("error decays as the particle budget grows") {
  ExperimentSpec spec = small_cube_spec();
  spec.stages = 6;
  spec.per_stage = 300;
  spec.replications = 8;
  spec.checkpoints = {1, 6};
  spec.base_seed = 13;
  const ExperimentResult result = aiscv::run_experiment(spec);
  double early = 0.0, late = 0.0;
  for (const char* g : {"g1", "g2", "g3"}) {
    early += find_row(result, "ais", g, 300).mse;
    late += find_row(result, "ais", g, 1800).mse;
  }
  CHECK(late < early);
}

TEST_CASE("summary rows reproduce the mean squared error definition") {
  ExperimentSpec spec = small_cube_spec();
  const ExperimentResult result = aiscv::run_experiment(spec);
  const Eigen::Index n_last = spec.stages * spec.per_stage;
  for (int j = 0; j < 3; ++j) {
    double acc = 0.0;
    int used = 0;
    for (const ReplicationRecord& rec : result.replications) {
      if (rec.failed) continue;
      const double err = rec.checkpoints.back().aiscv(j) - 1.0;
      acc += err * err;
      ++used;
    }
    const MseRow& row = find_row(result, "aiscv", result.integrand_labels[j], n_last);
    CHECK(row.replications_used == used);
    CHECK(row.mse == doctest::Approx(acc / used).epsilon(1e-12));
  }
  // 2 checkpoints x 2 methods x 3 integrands, no aggregate row for the cube.
  CHECK(result.summary.size() == 12);
}

TEST_CASE("the mixture summary adds an aggregate row") {
  ExperimentSpec spec = small_cube_spec();
  spec.family = Family::Mixture;
  spec.dimension = 2;
  spec.basis.kind = BasisKind::SteinMonomials;
  spec.basis.degree = 1;
  spec.mixture_variant = aiscv::MixtureVariant::Isotropic;
  const ExperimentResult result = aiscv::run_experiment(spec);
  const Eigen::Index n_last = spec.stages * spec.per_stage;
  const MseRow& x1 = find_row(result, "ais", "x1", n_last);
  const MseRow& x2 = find_row(result, "ais", "x2", n_last);
  const MseRow& agg = find_row(result, "ais", "x", n_last);
  CHECK(agg.mse == doctest::Approx(x1.mse + x2.mse).epsilon(1e-12));
  // 2 checkpoints x 2 methods x (2 components + 1 aggregate)
  CHECK(result.summary.size() == 12);
}

TEST_CASE("blr errors are measured relative to the ground truth") {
  ExperimentSpec spec = small_cube_spec();
  spec.family = Family::Blr;
  spec.dataset_path = housing_path();
  spec.basis.kind = BasisKind::SteinMonomials;
  spec.basis.degree = 1;
  spec.stages = 2;
  spec.per_stage = 150;
  spec.replications = 2;
  spec.checkpoints = {2};
  const ExperimentResult result = aiscv::run_experiment(spec);
  REQUIRE(result.failed_replications == 0);
  const double truth = result.ground_truth(0);
  double acc = 0.0;
  for (const ReplicationRecord& rec : result.replications) {
    const double rel = (rec.checkpoints[0].aiscv(0) - truth) / truth;
    acc += rel * rel;
  }
  const MseRow& row = find_row(result, "aiscv", "theta_sq", 300);
  CHECK(row.mse == doctest::Approx(acc / 2.0).epsilon(1e-12));
}

TEST_CASE("an unadaptable setup fails loudly rather than quietly") {
  ExperimentSpec spec = small_cube_spec();
  spec.family = Family::Blr;
  spec.dataset_path = housing_path();
  spec.basis.enabled = false;
  spec.stages = 1;
  spec.per_stage = 40;
  spec.replications = 2;
  spec.checkpoints = {1};
  // An absurdly tight noise model drives every importance weight to zero.
  spec.blr_noise_sigma = 1e-9;
  CHECK_THROWS_AS(aiscv::run_experiment(spec), NumericalFailure);
}

TEST_CASE("run_particles exposes the full particle set and control matrix") {
  ExperimentSpec spec = small_cube_spec();
  const auto [store, controls] = aiscv::run_particles(spec, 1);
  CHECK(store.size() == spec.stages * spec.per_stage);
  CHECK(store.dimension() == 2);
  CHECK(store.stage_count() == spec.stages);
  CHECK(controls.rows() == store.size());
  CHECK(controls.cols() == aiscv::legendre_pairs_basis(2, 2).size());
}

TEST_CASE("the housing dataset loads with the expected shape") {
  const IngestResult data = aiscv::ingest_csv(housing_path(), "");
  CHECK(data.features.rows() == 506);
  CHECK(data.features.cols() == 13);
  CHECK(data.response.size() == 506);
  CHECK(data.response_name == "medv");
  CHECK(data.feature_names.front() == "crim");
  CHECK(data.feature_names.back() == "lstat");
  CHECK(data.dropped_columns.empty());
  // Spot values from the committed file.
  CHECK(data.features(0, 0) == doctest::Approx(0.40974).epsilon(1e-12));
  CHECK(data.response(0) == doctest::Approx(23.2).epsilon(1e-12));
}

TEST_CASE("a tiny hand-written csv parses to exact values") {
  const fs::path path = temp_file("tiny.csv");
  write_file(path, "a,b,target\n1.5,2,3\n-0.25,4,5\n");
  const IngestResult data = aiscv::ingest_csv(path.string(), "target");
  REQUIRE(data.features.rows() == 2);
  REQUIRE(data.features.cols() == 2);
  CHECK(data.features(0, 0) == 1.5);
  CHECK(data.features(1, 0) == -0.25);
  CHECK(data.features(0, 1) == 2.0);
  CHECK(data.response(0) == 3.0);
  CHECK(data.response(1) == 5.0);
  CHECK(data.feature_names == std::vector<std::string>{"a", "b"});
  fs::remove(path);
}

TEST_CASE("headerless files get synthetic column names") {
  const fs::path path = temp_file("nohdr.csv");
  write_file(path, "1,2,3\n4,5,6\n");
  const IngestResult data = aiscv::ingest_csv(path.string(), "");
  CHECK(data.feature_names == std::vector<std::string>{"col1", "col2"});
  CHECK(data.response_name == "col3");
  CHECK(data.response(1) == 6.0);
  fs::remove(path);
}

TEST_CASE("alternate delimiters are honored") {
  const fs::path path = temp_file("semi.csv");
  write_file(path, "x;y;z\n1;2;3\n4;5;6\n");
  const IngestResult data = aiscv::ingest_csv(path.string(), "", ';');
  CHECK(data.features(1, 1) == 5.0);
  CHECK(data.response_name == "z");
  fs::remove(path);
}

TEST_CASE("categorical columns are dropped or label-encoded on request") {
  const fs::path path = temp_file("cat.csv");
  write_file(path,
             "sex,len,weight,rings\n"
             "M,0.5,1.2,10\n"
             "F,0.6,1.5,12\n"
             "I,0.3,0.4,5\n"
             "F,0.55,1.3,11\n");
  const IngestResult dropped =
      aiscv::ingest_csv(path.string(), "rings", ',', CategoricalHandling::Drop);
  CHECK(dropped.features.cols() == 2);
  CHECK(dropped.dropped_columns == std::vector<std::string>{"sex"});

  const IngestResult encoded =
      aiscv::ingest_csv(path.string(), "rings", ',', CategoricalHandling::Encode);
  CHECK(encoded.features.cols() == 3);
  CHECK(encoded.dropped_columns.empty());
  // Codes follow first appearance: M=0, F=1, I=2.
  const Eigen::Index sex = 0;
  CHECK(encoded.features(0, sex) == 0.0);
  CHECK(encoded.features(1, sex) == 1.0);
  CHECK(encoded.features(2, sex) == 2.0);
  CHECK(encoded.features(3, sex) == 1.0);
  fs::remove(path);
}

TEST_CASE("ingest failure modes carry precise diagnostics") {
  const fs::path ragged = temp_file("ragged.csv");
  write_file(ragged, "a,b\n1,2\n3\n");
  CHECK_THROWS_AS(aiscv::ingest_csv(ragged.string(), ""), ParseError);
  fs::remove(ragged);

  const fs::path mixed = temp_file("mixed.csv");
  write_file(mixed, "a,b\n1,2\n3,oops\n4,5\n");
  try {
    aiscv::ingest_csv(mixed.string(), "");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.column == 2);
  }
  fs::remove(mixed);

  const fs::path textonly = temp_file("textonly.csv");
  write_file(textonly, "a,b\nx,1\ny,2\n");
  // Column a is categorical and dropped, leaving no usable feature.
  CHECK_THROWS_AS(aiscv::ingest_csv(textonly.string(), "b"), EmptyDataset);
  fs::remove(textonly);

  CHECK_THROWS_AS(aiscv::ingest_csv("/nonexistent/path.csv", ""), aiscv::IoError);

  const fs::path small = temp_file("small.csv");
  write_file(small, "a,b\n1,2\n3,4\n");
  CHECK_THROWS_AS(aiscv::ingest_csv(small.string(), "missing"), ConfigError);
  CHECK_THROWS_AS(aiscv::ingest_csv(small.string(), "7"), ConfigError);
  fs::remove(small);

  const fs::path badtarget = temp_file("badtarget.csv");
  write_file(badtarget, "a,b\n1,x\n2,y\n");
  CHECK_THROWS_AS(aiscv::ingest_csv(badtarget.string(), "b"), ConfigError);
  fs::remove(badtarget);
}

TEST_CASE("target column selection by index and by default") {
  const fs::path path = temp_file("target.csv");
  write_file(path, "a,b,c\n1,2,3\n4,5,6\n");
  const IngestResult by_index = aiscv::ingest_csv(path.string(), "0");
  CHECK(by_index.response_name == "a");
  CHECK(by_index.response(0) == 1.0);
  CHECK(by_index.feature_names == std::vector<std::string>{"b", "c"});
  const IngestResult last = aiscv::ingest_csv(path.string(), "");
  CHECK(last.response_name == "c");
  fs::remove(path);
}

TEST_CASE("config files parse, layer and reject junk") {
  const fs::path path = temp_file("run.conf");
  write_file(path,
             "# comment line\n"
             "family = cube\n"
             "d = 2\n"
             "stages = 3\n"
             "per_stage = 50\n"
             "reps = 2\n"
             "basis = legendre:k=2\n"
             "seed = 7\n"
             "checkpoints = 2,3\n");
  const auto kv = aiscv::read_config_file(path.string());
  CHECK(kv.at("family") == "cube");
  CHECK(kv.at("seed") == "7");
  const ExperimentSpec spec = aiscv::spec_from_keyvalues(kv);
  CHECK(spec.family == Family::Cube);
  CHECK(spec.dimension == 2);
  CHECK(spec.stages == 3);
  CHECK(spec.per_stage == 50);
  CHECK(spec.replications == 2);
  CHECK(spec.base_seed == 7);
  CHECK(spec.basis.kind == BasisKind::LegendrePairs);
  CHECK(spec.basis.degree == 2);
  CHECK(spec.checkpoints == std::vector<int>{2, 3});
  fs::remove(path);

  // Later layers override earlier ones field by field.
  const ExperimentSpec layered = aiscv::spec_from_keyvalues({{"stages", "5"}}, spec);
  CHECK(layered.stages == 5);
  CHECK(layered.per_stage == 50);
  CHECK(layered.base_seed == 7);

  CHECK_THROWS_AS(aiscv::spec_from_keyvalues({{"no_such_key", "1"}}), ConfigError);
  CHECK_THROWS_AS(aiscv::spec_from_keyvalues({{"stages", "abc"}}), ConfigError);
  CHECK_THROWS_AS(aiscv::spec_from_keyvalues({{"basis", "legendre:q=3"}}), ConfigError);
  CHECK_THROWS_AS(aiscv::spec_from_keyvalues({{"family", "bogus"}}), ConfigError);
  CHECK_THROWS_AS(aiscv::read_config_file((path.string() + ".missing")), ConfigError);
}

TEST_CASE("the family default basis rule fills in the headline settings") {
  const ExperimentSpec cube = aiscv::spec_from_keyvalues({{"family", "cube"}});
  CHECK(cube.basis.kind == BasisKind::LegendrePairs);
  CHECK(cube.basis.degree == 6);
  const ExperimentSpec mix = aiscv::spec_from_keyvalues({{"family", "mixture"}});
  CHECK(mix.basis.kind == BasisKind::SteinMonomials);
  CHECK(mix.basis.degree == 2);
  const ExperimentSpec none =
      aiscv::spec_from_keyvalues({{"family", "mixture"}, {"basis", "none"}});
  CHECK_FALSE(none.basis.enabled);
  const ExperimentSpec tabbed = aiscv::spec_from_keyvalues({{"delimiter", "tab"}});
  CHECK(tabbed.delimiter == '\t');
}

TEST_CASE("json results round-trip bit-exact") {
  ExperimentSpec spec = small_cube_spec();
  const ExperimentResult result = aiscv::run_experiment(spec);
  const fs::path path = temp_file("result.json");
  aiscv::emit_results(result, OutputFormat::Json, path.string());
  const ExperimentResult back = aiscv::read_results_json(path.string());

  CHECK(back.version == result.version);
  CHECK(back.spec.family == result.spec.family);
  CHECK(back.spec.dimension == result.spec.dimension);
  CHECK(back.spec.base_seed == result.spec.base_seed);
  CHECK(back.integrand_labels == result.integrand_labels);
  CHECK(back.ground_truth == result.ground_truth);
  CHECK(back.failed_replications == result.failed_replications);
  REQUIRE(back.replications.size() == result.replications.size());
  for (std::size_t r = 0; r < result.replications.size(); ++r) {
    const auto& ra = result.replications[r];
    const auto& rb = back.replications[r];
    CHECK(rb.stream_id == ra.stream_id);
    REQUIRE(rb.checkpoints.size() == ra.checkpoints.size());
    for (std::size_t c = 0; c < ra.checkpoints.size(); ++c) {
      CHECK(rb.checkpoints[c].stage == ra.checkpoints[c].stage);
      CHECK(rb.checkpoints[c].ais == ra.checkpoints[c].ais);
      CHECK(rb.checkpoints[c].aiscv == ra.checkpoints[c].aiscv);
    }
  }
  REQUIRE(back.summary.size() == result.summary.size());
  for (std::size_t i = 0; i < result.summary.size(); ++i) {
    CHECK(back.summary[i].mse == result.summary[i].mse);
    CHECK(back.summary[i].method == result.summary[i].method);
    CHECK(back.summary[i].integrand == result.summary[i].integrand);
  }
  fs::remove(path);
}

TEST_CASE("detail csv has one row per estimate and the documented header") {
  ExperimentSpec spec = small_cube_spec();
  const ExperimentResult result = aiscv::run_experiment(spec);
  const fs::path path = temp_file("detail.csv");
  aiscv::emit_results(result, OutputFormat::Csv, path.string());
  const std::string detail = read_file(path);
  std::size_t rows = 0;
  for (char ch : detail) rows += (ch == '\n');
  // header + reps x methods x integrands x checkpoints
  CHECK(rows == 1 + 3 * 2 * 3 * 2);
  CHECK(detail.rfind("replication,method,integrand,n,estimate,error,squared_error\n", 0) == 0);
  const std::string summary = read_file(temp_file("detail_summary.csv"));
  CHECK(summary.rfind("method,integrand,n,replications_used,mse\n", 0) == 0);
  fs::remove(path);
  fs::remove(temp_file("detail_summary.csv"));
}

TEST_CASE("the command line maps error classes to exit codes") {
  CHECK(run_cli("check") == 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("run cube --no-such-flag") == 2);
  CHECK(run_cli("run bogus_family") == 2);
  CHECK(run_cli("run cube --basis stein:q=2 --d 2 --stages 1 --per-stage 20 --reps 1") == 2);
  const fs::path out = temp_file("cli_fail.csv");
  CHECK(run_cli("run blr --dataset " + housing_path() +
                " --noise-sigma 1e-9 --basis none --stages 1 --per-stage 30 --reps 2 --out " +
                out.string()) == 3);
  fs::remove(out);
}

TEST_CASE("cli runs write both csv artifacts") {
  const fs::path out = temp_file("cli_run.csv");
  const int rc = run_cli("run cube --d 2 --stages 2 --per-stage 40 --reps 2 --checkpoints 2 "
                         "--basis legendre:k=2 --seed 4 --out " + out.string());
  CHECK(rc == 0);
  CHECK(fs::exists(out));
  const fs::path summary = temp_file("cli_run_summary.csv");
  CHECK(fs::exists(summary));
  const std::string text = read_file(summary);
  CHECK(text.find("aiscv,g1,80,") != std::string::npos);
  fs::remove(out);
  fs::remove(summary);
}

}  // TEST_SUITE
