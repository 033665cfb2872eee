// File formats: key-value configs, measurement/truth CSV, JSON reports and
// the flat sweep and correlation-study tables.
//
// Every parse error is an Error(ErrorKind::parse) whose message starts with
// "<source>:<line>:" (and names the column for CSV input).
#pragma once

#include "nsinterf/evaluation.hpp"
#include "nsinterf/pipeline.hpp"
#include "nsinterf/simulator.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nsinterf::io {

/// `key = value` lines, `#` starts a comment, blank lines ignored.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& source);
  static ConfigFile load(const std::string& path);

  const std::string& source() const noexcept { return source_; }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  // Typed accessors mark the key as consumed. They throw a parse error naming
  // the key and its line when the value does not convert.
  std::string text(const std::string& key);
  long long integer(const std::string& key);
  double real(const std::string& key);
  bool flag(const std::string& key);
  std::vector<double> reals(const std::string& key);
  std::vector<std::string> words(const std::string& key);

  /// Throws for a missing required key.
  void require(const std::string& key) const;
  /// Throws for the first key no accessor consumed.
  void reject_unused() const;
  /// "<source>:<line>" for a present key.
  std::string where(const std::string& key) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& key);
  [[noreturn]] void bad_value(const std::string& key, const std::string& why) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

/// Simulation config. The seed comes from `seed_override` when given,
/// otherwise the `seed` key is required.
SimConfig sim_config_from(ConfigFile& cfg, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads the optional detector keys (variant, theta, fa.*) into `opts`.
void apply_detector_keys(ConfigFile& cfg, DetectorOptions& opts);

/// Sweep spec: simulation keys for the base config, grid.* lists, replicates,
/// threads and detector keys.
SweepSpec sweep_spec_from(ConfigFile& cfg, std::optional<std::uint64_t> seed_override = std::nullopt);

std::string format_measurements(const KpiMatrix& m);
KpiMatrix parse_measurements(const std::string& text, const std::string& source);

std::string format_assignment(const AssignmentMatrix& a);
AssignmentMatrix parse_assignment(const std::string& text, const std::string& source);

/// Per-period utilization, same layout as the measurement CSV.
std::string format_trace(const Matrix& trace);

std::string format_report(const DetectionReport& report);
DetectionReport parse_report(const std::string& text, const std::string& source);

std::string format_scorecard(const ScoreCard& card, bool has_stage1);

/// One row per (cell, metric).
std::string format_sweep(const std::vector<SweepCell>& cells);

/// One row per slice pair with its stage-1 labels.
std::string format_corr_study(const CorrelationStudy& study);

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace nsinterf::io
