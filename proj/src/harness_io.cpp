#include "aiscv/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace aiscv {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_cell_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == delimiter) {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_number(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!parse_cell_double(value, out))
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  long long out = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an integer");
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  const std::string t = trim(value);
  std::uint64_t out = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("config key '" + key + "': cannot parse '" + value +
                      "' as an unsigned integer");
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  for (const std::string& raw : split_line(value, ',')) {
    const std::string t = trim(raw);
    if (!t.empty()) items.push_back(t);
  }
  return items;
}

BasisConfig parse_basis(const std::string& value) {
  const std::string t = trim(value);
  BasisConfig basis;
  if (t == "none") {
    basis.enabled = false;
    return basis;
  }
  const std::size_t colon = t.find(':');
  const std::string kind = colon == std::string::npos ? t : t.substr(0, colon);
  if (kind == "legendre")
    basis.kind = BasisKind::LegendrePairs;
  else if (kind == "stein")
    basis.kind = BasisKind::SteinMonomials;
  else
    throw ConfigError("basis must be 'none', 'legendre:k=K' or 'stein:q=Q', got '" + value + "'");
  if (colon == std::string::npos)
    throw ConfigError("basis '" + value + "' is missing its degree, e.g. legendre:k=6");
  std::string deg = t.substr(colon + 1);
  const std::size_t eq = deg.find('=');
  if (eq != std::string::npos) {
    const std::string name = trim(deg.substr(0, eq));
    if ((basis.kind == BasisKind::LegendrePairs && name != "k") ||
        (basis.kind == BasisKind::SteinMonomials && name != "q"))
      throw ConfigError("basis degree key in '" + value + "' should be '" +
                        (basis.kind == BasisKind::LegendrePairs ? "k" : "q") + "'");
    deg = deg.substr(eq + 1);
  }
  basis.degree = static_cast<int>(parse_integer("basis", deg));
  return basis;
}

std::string basis_to_string(const BasisConfig& basis) {
  if (!basis.enabled) return "none";
  return basis.kind == BasisKind::LegendrePairs ? "legendre:k=" + std::to_string(basis.degree)
                                                : "stein:q=" + std::to_string(basis.degree);
}

// Physical lines with their 1-based numbers; blank lines are skipped but
// still counted, so ParseError line numbers match the file.
std::vector<std::pair<std::size_t, std::string>> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    lines.emplace_back(line_no, line);
  }
  return lines;
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const std::string& target_column, char delimiter,
                        CategoricalHandling categorical) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw EmptyDataset(path + " has no content");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(lines.size());
  const std::size_t ncols = split_line(lines.front().second, delimiter).size();
  for (const auto& [line_no, text] : lines) {
    std::vector<std::string> cells = split_line(text, delimiter);
    if (cells.size() != ncols)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(ncols) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no, 1);
    rows.push_back(std::move(cells));
  }

  // Header heuristic: some column starts with a non-numeric cell that turns
  // numeric on the next row. Purely categorical columns alone cannot signal a
  // header, but any numeric column will.
  bool has_header = false;
  if (rows.size() >= 2) {
    double ignored = 0.0;
    for (std::size_t c = 0; c < ncols; ++c)
      if (!parse_cell_double(rows[0][c], ignored) && parse_cell_double(rows[1][c], ignored)) {
        has_header = true;
        break;
      }
  }

  std::vector<std::string> names(ncols);
  for (std::size_t c = 0; c < ncols; ++c)
    names[c] = has_header ? trim(rows[0][c]) : "col" + std::to_string(c + 1);
  const std::size_t first_data = has_header ? 1 : 0;
  const std::size_t nrows = rows.size() - first_data;
  if (nrows == 0) throw EmptyDataset(path + " has a header but no data rows");

  // Classify columns: fully numeric, fully non-numeric (categorical), or
  // mixed, which is a hard parse failure at the first offending cell.
  std::vector<bool> is_numeric(ncols, true);
  for (std::size_t c = 0; c < ncols; ++c) {
    std::size_t numeric_count = 0;
    double ignored = 0.0;
    for (std::size_t r = first_data; r < rows.size(); ++r)
      if (parse_cell_double(rows[r][c], ignored)) ++numeric_count;
    if (numeric_count == nrows) {
      is_numeric[c] = true;
    } else if (numeric_count == 0) {
      is_numeric[c] = false;
    } else {
      for (std::size_t r = first_data; r < rows.size(); ++r)
        if (!parse_cell_double(rows[r][c], ignored))
          throw ParseError("line " + std::to_string(lines[r].first) + ", column " +
                               std::to_string(c + 1) + " ('" + names[c] +
                               "'): cell '" + trim(rows[r][c]) + "' is not numeric",
                           lines[r].first, c + 1);
    }
  }

  // Resolve the target column: empty selects the last file column, a string
  // of digits is a 0-based index, anything else is a header name.
  std::size_t target = ncols - 1;
  const std::string want = trim(target_column);
  if (!want.empty()) {
    long long idx = 0;
    const auto res = std::from_chars(want.data(), want.data() + want.size(), idx);
    if (res.ec == std::errc() && res.ptr == want.data() + want.size()) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= ncols)
        throw ConfigError("target column index " + want + " out of range for " +
                          std::to_string(ncols) + " columns");
      target = static_cast<std::size_t>(idx);
    } else {
      if (!has_header)
        throw ConfigError("target column '" + want + "' given by name but " + path +
                          " has no header row");
      const auto it = std::find(names.begin(), names.end(), want);
      if (it == names.end())
        throw ConfigError("target column '" + want + "' not found in " + path);
      target = static_cast<std::size_t>(it - names.begin());
    }
  }
  if (!is_numeric[target])
    throw ConfigError("target column '" + names[target] + "' in " + path + " is not numeric");

  IngestResult out;
  out.response_name = names[target];
  out.response.resize(static_cast<Eigen::Index>(nrows));
  for (std::size_t r = 0; r < nrows; ++r) {
    double v = 0.0;
    parse_cell_double(rows[r + first_data][target], v);
    out.response[static_cast<Eigen::Index>(r)] = v;
  }

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (c == target) continue;
    if (!is_numeric[c] && categorical == CategoricalHandling::Drop) {
      out.dropped_columns.push_back(names[c]);
      continue;
    }
    feature_cols.push_back(c);
    out.feature_names.push_back(names[c]);
  }
  if (feature_cols.empty()) throw EmptyDataset(path + " has no usable feature columns");

  out.features.resize(static_cast<Eigen::Index>(nrows),
                      static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t fc = 0; fc < feature_cols.size(); ++fc) {
    const std::size_t c = feature_cols[fc];
    if (is_numeric[c]) {
      for (std::size_t r = 0; r < nrows; ++r) {
        double v = 0.0;
        parse_cell_double(rows[r + first_data][c], v);
        out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(fc)) = v;
      }
    } else {
      // Label encoding by order of first appearance.
      std::vector<std::string> seen;
      for (std::size_t r = 0; r < nrows; ++r) {
        const std::string label = trim(rows[r + first_data][c]);
        auto it = std::find(seen.begin(), seen.end(), label);
        if (it == seen.end()) {
          seen.push_back(label);
          it = std::prev(seen.end());
        }
        out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(fc)) =
            static_cast<double>(it - seen.begin());
      }
    }
  }
  return out;
}

namespace {

ordered_json spec_to_json(const ExperimentSpec& spec) {
  ordered_json j;
  j["family"] = to_string(spec.family);
  j["d"] = spec.dimension;
  j["stages"] = spec.stages;
  j["per_stage"] = spec.per_stage;
  j["reps"] = spec.replications;
  j["checkpoints"] = spec.checkpoints;
  j["basis"] = basis_to_string(spec.basis);
  if (spec.policy.dof) j["nu"] = *spec.policy.dof;
  if (spec.policy.sigma0) j["sigma0"] = *spec.policy.sigma0;
  if (spec.policy.initial_mean)
    j["initial_mean"] = std::vector<double>(
        spec.policy.initial_mean->data(),
        spec.policy.initial_mean->data() + spec.policy.initial_mean->size());
  j["eta"] = spec.policy.defensive_eta;
  j["integrands"] = spec.integrands;
  j["variant"] = to_string(spec.mixture_variant);
  j["dataset"] = spec.dataset_path;
  j["target_col"] = spec.target_column;
  j["delimiter"] = std::string(1, spec.delimiter);
  j["categorical"] = to_string(spec.categorical);
  j["noise_sigma"] = spec.blr_noise_sigma;
  j["prior_scale"] = spec.blr_prior_scale;
  j["seed"] = spec.base_seed;
  j["threads"] = spec.threads;
  return j;
}

ExperimentSpec spec_from_json(const ordered_json& j) {
  std::map<std::string, std::string> kv;
  kv["family"] = j.at("family").get<std::string>();
  kv["d"] = std::to_string(j.at("d").get<long long>());
  kv["stages"] = std::to_string(j.at("stages").get<int>());
  kv["per_stage"] = std::to_string(j.at("per_stage").get<int>());
  kv["reps"] = std::to_string(j.at("reps").get<int>());
  std::string marks;
  for (const auto& c : j.at("checkpoints")) {
    if (!marks.empty()) marks += ',';
    marks += std::to_string(c.get<int>());
  }
  kv["checkpoints"] = marks;
  kv["basis"] = j.at("basis").get<std::string>();
  if (j.contains("nu")) kv["nu"] = format_double(j.at("nu").get<double>());
  if (j.contains("sigma0")) kv["sigma0"] = format_double(j.at("sigma0").get<double>());
  if (j.contains("initial_mean")) {
    std::string mean;
    for (const auto& v : j.at("initial_mean")) {
      if (!mean.empty()) mean += ',';
      mean += format_double(v.get<double>());
    }
    kv["initial_mean"] = mean;
  }
  kv["eta"] = format_double(j.at("eta").get<double>());
  std::string integrands;
  for (const auto& g : j.at("integrands")) {
    if (!integrands.empty()) integrands += ',';
    integrands += g.get<std::string>();
  }
  if (!integrands.empty()) kv["integrands"] = integrands;
  kv["variant"] = j.at("variant").get<std::string>();
  if (!j.at("dataset").get<std::string>().empty())
    kv["dataset"] = j.at("dataset").get<std::string>();
  if (!j.at("target_col").get<std::string>().empty())
    kv["target_col"] = j.at("target_col").get<std::string>();
  kv["delimiter"] = j.at("delimiter").get<std::string>();
  kv["categorical"] = j.at("categorical").get<std::string>();
  kv["noise_sigma"] = format_double(j.at("noise_sigma").get<double>());
  kv["prior_scale"] = format_double(j.at("prior_scale").get<double>());
  kv["seed"] = std::to_string(j.at("seed").get<std::uint64_t>());
  kv["threads"] = std::to_string(j.at("threads").get<int>());
  return spec_from_keyvalues(kv);
}

std::string summary_path_for(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "_summary";
  return path.substr(0, dot) + "_summary" + path.substr(dot);
}

void write_detail_csv(const ExperimentResult& result, std::ostream& out) {
  out << "replication,method,integrand,n,estimate,error,squared_error\n";
  const Eigen::Index p = result.ground_truth.size();
  for (const ReplicationRecord& rec : result.replications) {
    if (rec.failed) continue;
    for (const CheckpointEstimates& ck : rec.checkpoints) {
      for (const char* method : {"ais", "aiscv"}) {
        const VectorXd& est = std::string(method) == "ais" ? ck.ais : ck.aiscv;
        for (Eigen::Index j = 0; j < p; ++j) {
          const double truth = result.ground_truth[j];
          const double err = est[j] - truth;
          // The squared-error column is the MSE contribution, which is
          // relative for the blr family; the error column is always raw.
          double contrib = err;
          if (result.spec.family == Family::Blr) contrib /= truth;
          out << rec.stream_id << ',' << method << ','
              << result.integrand_labels[static_cast<std::size_t>(j)] << ',' << ck.particles
              << ',' << format_double(est[j]) << ',' << format_double(err) << ','
              << format_double(contrib * contrib) << '\n';
        }
      }
    }
  }
}

void write_summary_csv(const ExperimentResult& result, std::ostream& out) {
  out << "method,integrand,n,replications_used,mse\n";
  for (const MseRow& row : result.summary)
    out << row.method << ',' << row.integrand << ',' << row.particles << ','
        << row.replications_used << ',' << format_double(row.mse) << '\n';
}

}  // namespace

void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path) {
  if (format == OutputFormat::Csv) {
    std::ofstream detail(path, std::ios::binary);
    if (!detail) throw IoError("cannot open " + path);
    write_detail_csv(result, detail);
    if (!detail) throw IoError("write to " + path + " failed");

    const std::string spath = summary_path_for(path);
    std::ofstream summary(spath, std::ios::binary);
    if (!summary) throw IoError("cannot open " + spath);
    write_summary_csv(result, summary);
    if (!summary) throw IoError("write to " + spath + " failed");
    return;
  }

  ordered_json j;
  j["version"] = result.version;
  j["spec"] = spec_to_json(result.spec);
  j["integrands"] = result.integrand_labels;
  j["ground_truth"] = std::vector<double>(result.ground_truth.data(),
                                          result.ground_truth.data() + result.ground_truth.size());
  j["metadata"] = {{"wall_time_ms", result.wall_time_ms},
                   {"failed_replications", result.failed_replications},
                   {"notes", result.notes}};
  ordered_json reps = ordered_json::array();
  for (const ReplicationRecord& rec : result.replications) {
    ordered_json r;
    r["stream_id"] = rec.stream_id;
    r["failed"] = rec.failed;
    r["failure_reason"] = rec.failure_reason;
    ordered_json cks = ordered_json::array();
    for (const CheckpointEstimates& ck : rec.checkpoints) {
      ordered_json c;
      c["stage"] = ck.stage;
      c["n"] = ck.particles;
      c["ais"] = std::vector<double>(ck.ais.data(), ck.ais.data() + ck.ais.size());
      c["aiscv"] = std::vector<double>(ck.aiscv.data(), ck.aiscv.data() + ck.aiscv.size());
      cks.push_back(std::move(c));
    }
    r["checkpoints"] = std::move(cks);
    reps.push_back(std::move(r));
  }
  j["replications"] = std::move(reps);
  ordered_json summary = ordered_json::array();
  for (const MseRow& row : result.summary)
    summary.push_back({{"method", row.method},
                       {"integrand", row.integrand},
                       {"n", row.particles},
                       {"mse", row.mse},
                       {"replications_used", row.replications_used}});
  j["summary"] = std::move(summary);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

ExperimentResult read_results_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }

  ExperimentResult result;
  result.version = j.at("version").get<std::string>();
  result.spec = spec_from_json(j.at("spec"));
  result.integrand_labels = j.at("integrands").get<std::vector<std::string>>();
  const auto truth = j.at("ground_truth").get<std::vector<double>>();
  result.ground_truth =
      Eigen::Map<const VectorXd>(truth.data(), static_cast<Eigen::Index>(truth.size()));
  result.wall_time_ms = j.at("metadata").at("wall_time_ms").get<double>();
  result.failed_replications = j.at("metadata").at("failed_replications").get<int>();
  result.notes = j.at("metadata").at("notes").get<std::vector<std::string>>();
  for (const auto& r : j.at("replications")) {
    ReplicationRecord rec;
    rec.stream_id = r.at("stream_id").get<int>();
    rec.failed = r.at("failed").get<bool>();
    rec.failure_reason = r.at("failure_reason").get<std::string>();
    for (const auto& c : r.at("checkpoints")) {
      CheckpointEstimates ck;
      ck.stage = c.at("stage").get<int>();
      ck.particles = c.at("n").get<Eigen::Index>();
      const auto ais = c.at("ais").get<std::vector<double>>();
      const auto aiscv = c.at("aiscv").get<std::vector<double>>();
      ck.ais = Eigen::Map<const VectorXd>(ais.data(), static_cast<Eigen::Index>(ais.size()));
      ck.aiscv = Eigen::Map<const VectorXd>(aiscv.data(), static_cast<Eigen::Index>(aiscv.size()));
      rec.checkpoints.push_back(std::move(ck));
    }
    result.replications.push_back(std::move(rec));
  }
  for (const auto& s : j.at("summary")) {
    MseRow row;
    row.method = s.at("method").get<std::string>();
    row.integrand = s.at("integrand").get<std::string>();
    row.particles = s.at("n").get<Eigen::Index>();
    row.mse = s.at("mse").get<double>();
    row.replications_used = s.at("replications_used").get<int>();
    result.summary.push_back(std::move(row));
  }
  return result;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

ExperimentSpec spec_from_keyvalues(const std::map<std::string, std::string>& kv,
                                   const ExperimentSpec& base) {
  ExperimentSpec spec = base;

  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("family")) {
    if (*v == "cube")
      spec.family = Family::Cube;
    else if (*v == "mixture")
      spec.family = Family::Mixture;
    else if (*v == "blr")
      spec.family = Family::Blr;
    else
      throw ConfigError("family must be cube, mixture or blr, got '" + *v + "'");
    // Each family has a natural default basis; an explicit basis key below
    // overrides this.
    if (!get("basis"))
      spec.basis = spec.family == Family::Cube
                       ? BasisConfig{true, BasisKind::LegendrePairs, 6}
                       : BasisConfig{true, BasisKind::SteinMonomials, 2};
  }

  static const std::vector<std::string> known = {
      "family",     "d",        "stages",      "per_stage",   "reps",
      "checkpoints", "basis",   "nu",          "sigma0",      "initial_mean",
      "eta",        "integrands", "variant",   "dataset",     "target_col",
      "delimiter",  "categorical", "noise_sigma", "prior_scale", "seed",
      "threads"};
  for (const auto& [key, value] : kv)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key '" + key + "'");

  if (const auto* v = get("d")) spec.dimension = parse_integer("d", *v);
  if (const auto* v = get("stages")) spec.stages = static_cast<int>(parse_integer("stages", *v));
  if (const auto* v = get("per_stage"))
    spec.per_stage = static_cast<int>(parse_integer("per_stage", *v));
  if (const auto* v = get("reps"))
    spec.replications = static_cast<int>(parse_integer("reps", *v));
  if (const auto* v = get("checkpoints")) {
    spec.checkpoints.clear();
    for (const std::string& item : split_list(*v))
      spec.checkpoints.push_back(static_cast<int>(parse_integer("checkpoints", item)));
  }
  if (const auto* v = get("basis")) spec.basis = parse_basis(*v);
  if (const auto* v = get("nu")) spec.policy.dof = parse_number("nu", *v);
  if (const auto* v = get("sigma0")) spec.policy.sigma0 = parse_number("sigma0", *v);
  if (const auto* v = get("initial_mean")) {
    const std::vector<std::string> items = split_list(*v);
    VectorXd mean(static_cast<Eigen::Index>(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i)
      mean[static_cast<Eigen::Index>(i)] = parse_number("initial_mean", items[i]);
    spec.policy.initial_mean = std::move(mean);
  }
  if (const auto* v = get("eta")) spec.policy.defensive_eta = parse_number("eta", *v);
  if (const auto* v = get("integrands")) spec.integrands = split_list(*v);
  if (const auto* v = get("variant")) {
    if (*v == "isotropic")
      spec.mixture_variant = MixtureVariant::Isotropic;
    else if (*v == "anisotropic")
      spec.mixture_variant = MixtureVariant::Anisotropic;
    else
      throw ConfigError("variant must be isotropic or anisotropic, got '" + *v + "'");
  }
  if (const auto* v = get("dataset")) spec.dataset_path = *v;
  if (const auto* v = get("target_col")) spec.target_column = *v;
  if (const auto* v = get("delimiter")) {
    if (*v == "tab")
      spec.delimiter = '\t';
    else if (v->size() == 1)
      spec.delimiter = (*v)[0];
    else
      throw ConfigError("delimiter must be a single character or 'tab', got '" + *v + "'");
  }
  if (const auto* v = get("categorical")) {
    if (*v == "drop")
      spec.categorical = CategoricalHandling::Drop;
    else if (*v == "encode")
      spec.categorical = CategoricalHandling::Encode;
    else
      throw ConfigError("categorical must be drop or encode, got '" + *v + "'");
  }
  if (const auto* v = get("noise_sigma")) spec.blr_noise_sigma = parse_number("noise_sigma", *v);
  if (const auto* v = get("prior_scale")) spec.blr_prior_scale = parse_number("prior_scale", *v);
  if (const auto* v = get("seed")) spec.base_seed = parse_unsigned("seed", *v);
  if (const auto* v = get("threads")) spec.threads = static_cast<int>(parse_integer("threads", *v));
  return spec;
}

}  // namespace aiscv
