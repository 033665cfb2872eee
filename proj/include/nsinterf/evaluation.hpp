// Scoring detector output against ground truth, plus the parameter sweep and
// correlation-study harnesses.
#pragma once

#include "nsinterf/pipeline.hpp"
#include "nsinterf/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsinterf {

struct ScoreCard {
  double exact_fraction = 0.0;
  double covered_fraction = 0.0;
  int estimated_count = 0;
  int stage1_missed = 0;
  int stage1_false_pos = 0;
};

/// Fraction of truth rows reproduced exactly by some estimate row.
double exact_fraction(const AssignmentMatrix& truth, const AssignmentMatrix& estimate);

/// Fraction of truth rows dominated elementwise by some estimate row.
double covered_fraction(const AssignmentMatrix& truth, const AssignmentMatrix& estimate);

/// Graph with an edge between every pair of slices that share a resource.
InterferenceGraph co_sharing_graph(const AssignmentMatrix& truth);

struct Stage1Errors {
  int missed = 0;
  int false_pos = 0;
};

Stage1Errors stage1_errors(const AssignmentMatrix& truth, const InterferenceGraph& graph);

/// Scores a report; stage-1 counts are filled only when the report carries
/// intermediates.
ScoreCard score(const AssignmentMatrix& truth, const DetectionReport& report);

struct SweepSpec {
  SimConfig base;
  std::vector<int> periods;
  std::vector<double> weights_shared;
  std::vector<double> noise_variances;
  std::vector<CorrelationVariant> variants{CorrelationVariant::srcc};
  /// Each entry is one grid value; std::nullopt disables averaging.
  std::vector<std::optional<double>> exp_averaging{std::nullopt};
  int replicates = 25;
  std::uint64_t seed = 1;
  DetectorOptions detector;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct SweepCell {
  int n_periods = 0;
  double weight_shared = 0.0;
  double noise_variance = 0.0;
  CorrelationVariant variant = CorrelationVariant::srcc;
  std::optional<double> exp_averaging;
  int replicates_ok = 0;
  int replicates_failed = 0;
  double mean_exact = 0.0;
  double mean_covered = 0.0;
  double mean_estimated_count = 0.0;
  double mean_stage1_missed = 0.0;
  double mean_stage1_false_pos = 0.0;
  std::vector<std::string> failures;

  bool partial() const noexcept { return replicates_failed > 0; }
};

/// Seed for one replicate of one grid cell.
std::uint64_t cell_seed(std::uint64_t base, int n_periods, double weight_shared,
                        double noise_variance, CorrelationVariant variant, int replicate);

/// Cells sorted by (T, w_S, sigma^2, variant, alpha).
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

struct PairRecord {
  int i = 0;
  int j = 0;
  double pcc = 0.0;
  double srcc = 0.0;
  bool sharing = false;  // ground truth
  bool srcc_edge = false;
  bool pcc_edge = false;
};

struct CorrelationStudy {
  std::vector<PairRecord> pairs;  // every i < j
  ScoreCard srcc_stage1;           // only the stage-1 counts are meaningful
  ScoreCard pcc_stage1;
};

/// Stage-1 outcome label: "corr", "uncorr", "missed" or "false_pos".
std::string stage1_label(bool sharing, bool edge);

/// Stage-1 graphs use the same coefficient floor as detect with `opts`.
CorrelationStudy correlation_study(const SimConfig& config, const DetectorOptions& opts = {});

}  // namespace nsinterf
