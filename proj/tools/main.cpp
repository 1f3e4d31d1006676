#include "aiscv/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

// Every flag funnels into the same key=value map as the config file, so
// precedence is simply: defaults, then file values, then flags.
struct FlagCapture {
  std::map<std::string, std::string> values;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

void add_experiment_flags(CLI::App* cmd, FlagCapture& flags) {
  flags.add(cmd, "--d", "d", "dimension (cube and mixture)");
  flags.add(cmd, "--stages", "stages", "number of adaptation stages T");
  flags.add(cmd, "--per-stage", "per_stage", "particles per stage");
  flags.add(cmd, "--reps", "reps", "number of replications");
  flags.add(cmd, "--checkpoints", "checkpoints",
            "comma-separated stage counts to report (final stage always included)");
  flags.add(cmd, "--basis", "basis", "control variates: legendre:k=K, stein:q=Q or none");
  flags.add(cmd, "--seed", "seed", "base RNG seed");
  flags.add(cmd, "--nu", "nu", "policy degrees of freedom");
  flags.add(cmd, "--sigma0", "sigma0", "initial covariance scale");
  flags.add(cmd, "--initial-mean", "initial_mean", "comma-separated initial policy mean");
  flags.add(cmd, "--eta", "eta", "defensive mixture weight in [0,1), 0 disables");
  flags.add(cmd, "--integrands", "integrands", "cube integrand subset, e.g. g1,g3");
  flags.add(cmd, "--variant", "variant", "mixture variant: isotropic or anisotropic");
  flags.add(cmd, "--dataset", "dataset", "CSV dataset path (blr)");
  flags.add(cmd, "--target-col", "target_col", "response column name or 0-based index");
  flags.add(cmd, "--delimiter", "delimiter", "CSV delimiter character or 'tab'");
  flags.add(cmd, "--categorical", "categorical", "categorical feature handling: drop or encode");
  flags.add(cmd, "--noise-sigma", "noise_sigma", "regression noise standard deviation (blr)");
  flags.add(cmd, "--prior-scale", "prior_scale", "prior covariance scale (blr)");
  flags.add(cmd, "--threads", "threads", "worker threads (0 = hardware)");
}

aiscv::ExperimentSpec build_spec(const std::string& family, const std::string& config_path,
                                 const std::map<std::string, std::string>& flag_values) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = aiscv::read_config_file(config_path);
  for (const auto& [key, value] : flag_values) kv[key] = value;
  kv["family"] = family;
  return aiscv::spec_from_keyvalues(kv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive importance sampling with control-variate quadrature"};
  app.require_subcommand(1);

  std::string family;
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  FlagCapture run_flags;

  CLI::App* run = app.add_subcommand("run", "run an experiment family");
  run->add_option("family", family, "experiment family: cube, mixture or blr")->required();
  run->add_option("--config", config_path, "key=value config file; flags override it");
  run->add_option("--out", out_path, "output path (default results.csv / results.json)");
  run->add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_experiment_flags(run, run_flags);

  std::string quad_family;
  std::string quad_config;
  std::string quad_out = "quadrature.csv";
  int quad_stream = 0;
  FlagCapture quad_flags;

  CLI::App* quad = app.add_subcommand("quadrature", "quadrature rule utilities");
  CLI::App* quad_export =
      quad->add_subcommand("export", "run one replication and write its quadrature rule CSV");
  quad_export->add_option("family", quad_family, "experiment family: cube, mixture or blr")
      ->required();
  quad_export->add_option("--config", quad_config, "key=value config file; flags override it");
  quad_export->add_option("--out", quad_out, "output CSV path");
  quad_export->add_option("--stream", quad_stream, "replication stream id");
  add_experiment_flags(quad_export, quad_flags);
  quad->require_subcommand(1);

  CLI::App* check = app.add_subcommand("check", "run the built-in property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      const aiscv::ExperimentSpec spec = build_spec(family, config_path, run_flags.values);
      const aiscv::ExperimentResult result = aiscv::run_experiment(spec);
      const aiscv::OutputFormat fmt =
          format == "json" ? aiscv::OutputFormat::Json : aiscv::OutputFormat::Csv;
      if (out_path.empty()) out_path = "results." + format;
      aiscv::emit_results(result, fmt, out_path);
      std::cout << "wrote " << out_path << " (" << result.replications.size() << " replications, "
                << result.failed_replications << " failed, "
                << aiscv::format_double(result.wall_time_ms) << " ms)\n";
      for (const aiscv::MseRow& row : result.summary)
        std::cout << row.method << " " << row.integrand << " n=" << row.particles
                  << " mse=" << aiscv::format_double(row.mse) << "\n";
      return 0;
    }
    if (quad_export->parsed()) {
      const aiscv::ExperimentSpec spec = build_spec(quad_family, quad_config, quad_flags.values);
      const auto [store, controls] = aiscv::run_particles(spec, quad_stream);
      const aiscv::QuadratureRule rule = aiscv::build_quadrature(store, controls);
      aiscv::write_quadrature_csv(store, rule, quad_out);
      std::cout << "wrote " << quad_out << " (" << store.size() << " particles)\n";
      return 0;
    }
    if (check->parsed()) {
      return aiscv::run_self_check(std::cout) == 0 ? 0 : 3;
    }
  } catch (const aiscv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const aiscv::ParseError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 2;
  } catch (const aiscv::EmptyDataset& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 2;
  } catch (const aiscv::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const aiscv::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const aiscv::DegenerateQuadrature& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const aiscv::ZeroWeightSum& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
