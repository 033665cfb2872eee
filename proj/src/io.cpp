#include "nsinterf/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace nsinterf::io {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::parse, where + ": " + what);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest text that reads back to the same double.
std::string fmt_short(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines carry no data.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::string header_row(const std::string& first, int columns) {
  std::string out = first;
  for (int i = 0; i < columns; ++i) out += ",ns_" + std::to_string(i);
  return out + "\n";
}

// Header "<first>,<name>,..." followed by rows "<index>,<v>,...". Returns the
// cell text; checks shape and the leading index column.
std::vector<std::vector<std::string>> parse_table(const std::string& text, const std::string& source,
                                                  const std::string& first) {
  const auto lines = lines_of(text);
  if (lines.empty()) parse_error(source + ":1", "empty file");
  const auto header = split(lines[0], ',');
  if (header[0] != first) parse_error(source + ":1", "header must start with '" + first + "'");
  const std::size_t width = header.size();
  if (width < 2) parse_error(source + ":1", "header has no data columns");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = source + ":" + std::to_string(r + 1);
    auto cells = split(lines[r], ',');
    if (cells.size() != width) {
      parse_error(where, "expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
    }
    const auto index = to_integer(cells[0]);
    if (!index || *index != static_cast<long long>(r - 1)) {
      parse_error(where + ": column 1", "expected " + first + " index " + std::to_string(r - 1));
    }
    cells.erase(cells.begin());
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) parse_error(source + ":2", "no data rows");
  return rows;
}

json index_sets(const std::vector<IndexSet>& sets) {
  json out = json::array();
  for (const auto& s : sets) out.push_back(s);
  return out;
}

json matrix_rows(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

// ---- key-value configs ----------------------------------------------------

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) parse_error(where, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) parse_error(where, "missing key before '='");
    if (value.empty()) parse_error(where, "key '" + key + "' has no value");
    auto [it, fresh] = cfg.entries_.emplace(key, Entry{value, line_no});
    if (!fresh) {
      parse_error(where, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second.line) + ")");
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) { return parse(read_file(path), path); }

const ConfigFile::Entry& ConfigFile::entry(const std::string& key) {
  require(key);
  used_.insert(key);
  return entries_.at(key);
}

std::string ConfigFile::where(const std::string& key) const {
  const auto it = entries_.find(key);
  return source_ + ":" + (it == entries_.end() ? std::string("?") : std::to_string(it->second.line));
}

void ConfigFile::bad_value(const std::string& key, const std::string& why) const {
  parse_error(where(key), "key '" + key + "': " + why);
}

void ConfigFile::require(const std::string& key) const {
  if (!has(key)) throw Error(ErrorKind::parse, source_ + ": missing required key '" + key + "'");
}

std::string ConfigFile::text(const std::string& key) { return entry(key).value; }

long long ConfigFile::integer(const std::string& key) {
  const auto v = to_integer(entry(key).value);
  if (!v) bad_value(key, "expected an integer, got '" + entries_.at(key).value + "'");
  return *v;
}

double ConfigFile::real(const std::string& key) {
  const auto v = to_double(entry(key).value);
  if (!v) bad_value(key, "expected a number, got '" + entries_.at(key).value + "'");
  return *v;
}

bool ConfigFile::flag(const std::string& key) {
  const std::string& v = entry(key).value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, "expected true or false, got '" + v + "'");
}

std::vector<double> ConfigFile::reals(const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(entry(key).value, ',')) {
    const auto v = to_double(item);
    if (!v) bad_value(key, "expected a comma-separated list of numbers, got '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::string> ConfigFile::words(const std::string& key) {
  auto out = split(entry(key).value, ',');
  for (const auto& w : out) {
    if (w.empty()) bad_value(key, "empty list item");
  }
  return out;
}

void ConfigFile::reject_unused() const {
  for (const auto& [key, e] : entries_) {
    if (!used_.count(key)) parse_error(source_ + ":" + std::to_string(e.line), "unknown key '" + key + "'");
  }
}

namespace {

// Optional keys shared by simulate configs and sweep specs. The grid keys of
// a sweep (n_periods, weight_shared, noise_variance, exp_averaging) are read
// by the caller.
void read_sim_keys(ConfigFile& cfg, SimConfig& c, bool grid_keys) {
  auto positive_int = [&](const std::string& key, int& field) {
    if (!cfg.has(key)) return;
    const long long v = cfg.integer(key);
    if (v < 1 || v > 1'000'000'000) throw Error(ErrorKind::parse, cfg.where(key) + ": key '" + key + "': out of range");
    field = static_cast<int>(v);
  };
  auto real = [&](const std::string& key, double& field) {
    if (cfg.has(key)) field = cfg.real(key);
  };
  positive_int("n_slices", c.n_slices);
  positive_int("n_resources", c.n_resources);
  if (grid_keys) {
    positive_int("n_periods", c.n_periods);
    real("weight_shared", c.weight_shared);
    real("noise_variance", c.noise_variance);
    if (cfg.has("exp_averaging")) {
      const std::string v = cfg.text("exp_averaging");
      if (v == "none") {
        c.exp_averaging.reset();
      } else {
        const auto a = to_double(v);
        if (!a) throw Error(ErrorKind::parse, cfg.where("exp_averaging") + ": key 'exp_averaging': expected a number or 'none'");
        c.exp_averaging = *a;
      }
    }
  }
  if (cfg.has("utilization_levels")) c.utilization_levels = cfg.reals("utilization_levels");
  real("diag_prob", c.diag_prob);
  real("offdiag_row_sum", c.offdiag_row_sum);
  real("g_threshold", c.g_threshold);
  real("h_threshold", c.h_threshold);
  if (cfg.has("fixed_delay")) c.fixed_delay = cfg.reals("fixed_delay");
  real("assignment_density", c.assignment_density);
}

std::uint64_t read_seed(ConfigFile& cfg, std::optional<std::uint64_t> seed_override) {
  if (cfg.has("seed")) {
    const std::string v = cfg.text("seed");
    std::uint64_t s = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw Error(ErrorKind::parse, cfg.where("seed") + ": key 'seed': expected an unsigned 64-bit integer");
    }
    if (!seed_override) return s;
  }
  if (seed_override) return *seed_override;
  cfg.require("seed");
  return 0;
}

// Config validation errors become parse errors that point at the file.
template <typename F>
void validated(const ConfigFile& cfg, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invalid_argument) throw;
    throw Error(ErrorKind::parse, cfg.source() + ": " + e.what());
  }
}

}  // namespace

SimConfig sim_config_from(ConfigFile& cfg, std::optional<std::uint64_t> seed_override) {
  SimConfig c;
  for (const char* key : {"n_slices", "n_resources", "n_periods"}) cfg.require(key);
  read_sim_keys(cfg, c, true);
  c.seed = read_seed(cfg, seed_override);
  cfg.reject_unused();
  validated(cfg, [&] { c.validate(); });
  return c;
}

void apply_detector_keys(ConfigFile& cfg, DetectorOptions& opts) {
  if (cfg.has("variant")) {
    try {
      opts.variant = parse_variant(cfg.text("variant"));
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, cfg.where("variant") + ": " + e.what());
    }
  }
  if (cfg.has("theta")) opts.theta = cfg.real("theta");
  if (cfg.has("edge_z")) opts.edge_z = cfg.real("edge_z");
  if (cfg.has("merge_z")) opts.merge_z = cfg.real("merge_z");
  FaOptions& fa = opts.fa;
  if (cfg.has("fa.max_iter")) fa.max_iter = static_cast<int>(cfg.integer("fa.max_iter"));
  if (cfg.has("fa.tol")) fa.tol = cfg.real("fa.tol");
  if (cfg.has("fa.uniqueness_floor")) fa.uniqueness_floor = cfg.real("fa.uniqueness_floor");
  if (cfg.has("fa.tie_tolerance")) fa.tie_tolerance = cfg.real("fa.tie_tolerance");
  if (cfg.has("fa.selection")) {
    const std::string v = cfg.text("fa.selection");
    if (v == "bic") {
      fa.selection = FactorSelection::bic;
    } else if (v == "max_likelihood") {
      fa.selection = FactorSelection::max_likelihood;
    } else {
      throw Error(ErrorKind::parse, cfg.where("fa.selection") + ": key 'fa.selection': expected bic or max_likelihood");
    }
  }
  CliqueRefinement& r = fa.refine;
  if (cfg.has("fa.refine")) r.enabled = cfg.flag("fa.refine");
  if (cfg.has("fa.refine.z_pair")) r.z_pair = cfg.real("fa.refine.z_pair");
  if (cfg.has("fa.refine.z_link")) r.z_link = cfg.real("fa.refine.z_link");
  if (cfg.has("fa.refine.quiet_quantile")) r.quiet_quantile = cfg.real("fa.refine.quiet_quantile");
  if (cfg.has("fa.refine.min_quiet_periods")) {
    r.min_quiet_periods = static_cast<int>(cfg.integer("fa.refine.min_quiet_periods"));
  }
}

SweepSpec sweep_spec_from(ConfigFile& cfg, std::optional<std::uint64_t> seed_override) {
  SweepSpec spec;
  for (const char* key : {"n_slices", "n_resources", "grid.n_periods", "grid.weight_shared", "grid.noise_variance"}) {
    cfg.require(key);
  }
  for (const char* key : {"n_periods", "weight_shared", "noise_variance", "exp_averaging"}) {
    if (cfg.has(key)) {
      throw Error(ErrorKind::parse, cfg.where(key) + ": key '" + key + "' is swept; use 'grid." + key + "'");
    }
  }
  read_sim_keys(cfg, spec.base, false);
  spec.seed = read_seed(cfg, seed_override);
  spec.base.seed = spec.seed;

  spec.periods.clear();
  for (double t : cfg.reals("grid.n_periods")) {
    if (t != static_cast<int>(t) || t < 2) {
      throw Error(ErrorKind::parse, cfg.where("grid.n_periods") + ": key 'grid.n_periods': values must be integers >= 2");
    }
    spec.periods.push_back(static_cast<int>(t));
  }
  spec.weights_shared = cfg.reals("grid.weight_shared");
  spec.noise_variances = cfg.reals("grid.noise_variance");
  if (cfg.has("grid.variant")) {
    spec.variants.clear();
    for (const auto& v : cfg.words("grid.variant")) {
      try {
        spec.variants.push_back(parse_variant(v));
      } catch (const Error& e) {
        throw Error(ErrorKind::parse, cfg.where("grid.variant") + ": key 'grid.variant': " + e.what());
      }
    }
  }
  if (cfg.has("grid.exp_averaging")) {
    spec.exp_averaging.clear();
    for (const auto& v : cfg.words("grid.exp_averaging")) {
      if (v == "none") {
        spec.exp_averaging.emplace_back(std::nullopt);
        continue;
      }
      const auto a = to_double(v);
      if (!a) {
        throw Error(ErrorKind::parse, cfg.where("grid.exp_averaging") + ": key 'grid.exp_averaging': expected numbers or 'none'");
      }
      spec.exp_averaging.emplace_back(*a);
    }
  }
  if (cfg.has("replicates")) spec.replicates = static_cast<int>(cfg.integer("replicates"));
  if (cfg.has("threads")) spec.threads = static_cast<int>(cfg.integer("threads"));
  apply_detector_keys(cfg, spec.detector);
  cfg.reject_unused();
  validated(cfg, [&] { spec.validate(); });
  return spec;
}

// ---- CSV --------------------------------------------------------------------

std::string format_measurements(const KpiMatrix& m) {
  std::string out = header_row("period", m.slices());
  const Matrix& v = m.values();
  for (int t = 0; t < m.periods(); ++t) {
    out += std::to_string(t);
    for (int i = 0; i < m.slices(); ++i) out += "," + fmt17(v(t, i));
    out += "\n";
  }
  return out;
}

KpiMatrix parse_measurements(const std::string& text, const std::string& source) {
  const auto rows = parse_table(text, source, "period");
  Matrix v(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const auto x = to_double(rows[r][c]);
      if (!x || !std::isfinite(*x) || *x < 0.0) {
        parse_error(source + ":" + std::to_string(r + 2) + ": column " + std::to_string(c + 2),
                    "expected a finite nonnegative number, got '" + rows[r][c] + "'");
      }
      v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *x;
    }
  }
  try {
    return KpiMatrix(std::move(v));
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, source + ": " + e.what());
  }
}

std::string format_assignment(const AssignmentMatrix& a) {
  std::string out = header_row("resource", a.slices());
  for (int j = 0; j < a.resources(); ++j) {
    out += std::to_string(j);
    for (int i = 0; i < a.slices(); ++i) out += a.at(j, i) ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

AssignmentMatrix parse_assignment(const std::string& text, const std::string& source) {
  const auto rows = parse_table(text, source, "resource");
  BinaryMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const std::string& cell = rows[r][c];
      if (cell != "0" && cell != "1") {
        parse_error(source + ":" + std::to_string(r + 2) + ": column " + std::to_string(c + 2),
                    "expected 0 or 1, got '" + cell + "'");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cell == "1" ? 1 : 0;
    }
  }
  return AssignmentMatrix(std::move(m));
}

std::string format_trace(const Matrix& trace) {
  std::string out = header_row("period", static_cast<int>(trace.cols()));
  for (Eigen::Index t = 0; t < trace.rows(); ++t) {
    out += std::to_string(t);
    for (Eigen::Index i = 0; i < trace.cols(); ++i) out += "," + fmt17(trace(t, i));
    out += "\n";
  }
  return out;
}

// ---- reports ----------------------------------------------------------------

std::string format_report(const DetectionReport& report) {
  const AssignmentMatrix& a = report.estimate;
  json j;
  j["format"] = "nsinterf-report";
  j["version"] = 1;
  j["variant"] = to_string(report.variant);
  j["theta"] = report.theta;
  j["slices"] = a.slices();
  std::vector<IndexSet> rows;
  for (int r = 0; r < a.resources(); ++r) rows.push_back(a.row_support(r));
  j["estimate"] = index_sets(rows);
  j["warnings"] = report.warnings;
  if (report.intermediates) {
    const DetectionIntermediates& im = *report.intermediates;
    json inter;
    inter["correlation"] = matrix_rows(im.correlation.entries());
    json edges = json::array();
    for (int u = 0; u < im.graph.size(); ++u) {
      for (int v = u + 1; v < im.graph.size(); ++v) {
        if (im.graph.has_edge(u, v)) edges.push_back({u, v});
      }
    }
    inter["graph_edges"] = std::move(edges);
    json completed = json::array();
    for (const auto& [u, v] : im.completed_edges) completed.push_back({u, v});
    inter["completed_edges"] = std::move(completed);
    inter["split"] = {{"low", im.split.low},
                      {"high", im.split.high},
                      {"threshold", im.split.threshold()},
                      {"iterations", im.split.iterations}};
    inter["cliques"] = index_sets(im.cliques);
    json fits = json::array();
    for (const auto& f : im.fits) {
      fits.push_back({{"clique", f.clique},
                      {"q", f.q},
                      {"log_likelihood", f.log_likelihood},
                      {"converged", f.converged},
                      {"subsets", index_sets(f.subsets)}});
    }
    inter["fits"] = std::move(fits);
    j["intermediates"] = std::move(inter);
  }
  return j.dump(2) + "\n";
}

DetectionReport parse_report(const std::string& text, const std::string& source) {
  if (lines_of(text).empty()) parse_error(source + ":1", "empty file");
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(source, e.what());
  }
  try {
    if (j.at("format") != "nsinterf-report") parse_error(source, "not a detection report");
    DetectionReport report;
    report.variant = parse_variant(j.at("variant").get<std::string>());
    report.theta = j.at("theta").get<double>();
    const int n = j.at("slices").get<int>();
    if (n < 0) parse_error(source, "negative slice count");
    report.estimate = AssignmentMatrix::from_subsets(j.at("estimate").get<std::vector<IndexSet>>(), n);
    report.warnings = j.value("warnings", std::vector<std::string>{});
    if (j.contains("intermediates")) {
      const json& in = j.at("intermediates");
      DetectionIntermediates im;
      const auto corr = in.at("correlation").get<std::vector<std::vector<double>>>();
      Matrix c(n, n);
      if (static_cast<int>(corr.size()) != n) parse_error(source, "correlation matrix has the wrong size");
      for (int r = 0; r < n; ++r) {
        if (static_cast<int>(corr[static_cast<std::size_t>(r)].size()) != n) {
          parse_error(source, "correlation matrix has the wrong size");
        }
        for (int k = 0; k < n; ++k) c(r, k) = corr[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      }
      im.correlation = CorrelationMatrix(std::move(c));
      im.graph = InterferenceGraph(n);
      for (const auto& e : in.at("graph_edges")) im.graph.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
      for (const auto& e : in.value("completed_edges", json::array())) {
        im.completed_edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
      const json& split = in.at("split");
      im.split.low = split.at("low").get<double>();
      im.split.high = split.at("high").get<double>();
      im.split.iterations = split.at("iterations").get<int>();
      im.cliques = in.at("cliques").get<CliqueList>();
      for (const auto& f : in.at("fits")) {
        CliqueFit fit;
        fit.clique = f.at("clique").get<IndexSet>();
        fit.q = f.at("q").get<int>();
        fit.log_likelihood = f.at("log_likelihood").get<double>();
        fit.converged = f.at("converged").get<bool>();
        fit.subsets = f.at("subsets").get<std::vector<IndexSet>>();
        im.fits.push_back(std::move(fit));
      }
      report.intermediates = std::move(im);
    }
    return report;
  } catch (const json::exception& e) {
    parse_error(source, std::string("malformed report: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    parse_error(source, std::string("malformed report: ") + e.what());
  }
}

std::string format_scorecard(const ScoreCard& card, bool has_stage1) {
  json j;
  j["exact_fraction"] = card.exact_fraction;
  j["covered_fraction"] = card.covered_fraction;
  j["estimated_count"] = card.estimated_count;
  if (has_stage1) {
    j["stage1_missed"] = card.stage1_missed;
    j["stage1_false_pos"] = card.stage1_false_pos;
  }
  return j.dump(2) + "\n";
}

// ---- tables -----------------------------------------------------------------

std::string format_sweep(const std::vector<SweepCell>& cells) {
  std::string out =
      "n_periods,weight_shared,noise_variance,variant,exp_averaging,metric,mean,replicates_ok,replicates_failed,status\n";
  for (const auto& c : cells) {
    const std::string key = std::to_string(c.n_periods) + "," + fmt_short(c.weight_shared) + "," +
                            fmt_short(c.noise_variance) + "," + to_string(c.variant) + "," +
                            (c.exp_averaging ? fmt_short(*c.exp_averaging) : std::string("none"));
    const std::string tail = "," + std::to_string(c.replicates_ok) + "," + std::to_string(c.replicates_failed) +
                             "," + (c.replicates_ok == 0 ? "failed" : c.partial() ? "partial" : "ok") + "\n";
    const std::pair<const char*, double> metrics[] = {
        {"exact_fraction", c.mean_exact},
        {"covered_fraction", c.mean_covered},
        {"estimated_count", c.mean_estimated_count},
        {"stage1_missed", c.mean_stage1_missed},
        {"stage1_false_pos", c.mean_stage1_false_pos},
    };
    for (const auto& [name, value] : metrics) out += key + "," + name + "," + fmt_short(value) + tail;
  }
  return out;
}

std::string format_corr_study(const CorrelationStudy& study) {
  std::string out = "i,j,pcc,srcc,sharing,srcc_outcome,pcc_outcome\n";
  for (const auto& p : study.pairs) {
    out += std::to_string(p.i) + "," + std::to_string(p.j) + "," + fmt_short(p.pcc) + "," + fmt_short(p.srcc) + "," +
           (p.sharing ? "1" : "0") + "," + stage1_label(p.sharing, p.srcc_edge) + "," +
           stage1_label(p.sharing, p.pcc_edge) + "\n";
  }
  return out;
}

// ---- files ------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io, "error while reading '" + path + "'");
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorKind::io, "error while writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(ErrorKind::io, "cannot move output into place at '" + path + "': " + ec.message());
  }
}

}  // namespace nsinterf::io
