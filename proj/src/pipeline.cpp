#include "nsinterf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsinterf {

void DetectorOptions::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "theta must lie in (0, 1]");
  }
  if (fa.max_iter < 1) throw Error(ErrorKind::invalid_argument, "fa.max_iter must be positive");
  if (!(fa.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "fa.tol must be positive");
  if (!(fa.uniqueness_floor > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "fa.uniqueness_floor must be positive");
  }
  if (!(edge_z >= 0.0)) throw Error(ErrorKind::invalid_argument, "edge_z must be nonnegative");
  if (!(merge_z >= 0.0)) throw Error(ErrorKind::invalid_argument, "merge_z must be nonnegative");
  const auto& r = fa.refine;
  if (!(r.z_pair >= 0.0) || !(r.z_link >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "fa.refine z thresholds must be nonnegative");
  }
  if (!(r.quiet_quantile > 0.0 && r.quiet_quantile < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "fa.refine.quiet_quantile must lie in (0, 1)");
  }
  if (r.min_quiet_periods < 3) {
    throw Error(ErrorKind::invalid_argument, "fa.refine.min_quiet_periods must be at least 3");
  }
}

namespace {

double noise_scale(int periods) { return 1.0 / std::sqrt(static_cast<double>(periods) - 1.0); }

}  // namespace

InterferenceGraph stage1_graph(const DetectionIntermediates& im) {
  BinaryMatrix adj = im.graph.adjacency();
  for (const auto& [i, j] : im.completed_edges) adj(i, j) = adj(j, i) = 0;
  return InterferenceGraph(std::move(adj));
}

GraphResult stage1(const CorrelationMatrix& c, int periods, const DetectorOptions& opts) {
  const double floor = opts.edge_z > 0.0 ? opts.edge_z * noise_scale(periods)
                                         : -std::numeric_limits<double>::infinity();
  return build_interference_graph(c, floor);
}

DetectionReport detect(const KpiMatrix& m, const DetectorOptions& opts) {
  opts.validate();
  DetectionReport report;
  report.variant = opts.variant;
  report.theta = opts.theta;

  CorrelationResult corr = correlation_for(m, opts.variant);
  report.warnings = corr.warnings;

  GraphResult graph = stage1(corr.matrix, m.periods(), opts);
  report.warnings.insert(report.warnings.end(), graph.warnings.begin(), graph.warnings.end());

  CliqueList cliques = maximal_cliques(graph.graph);
  std::vector<Edge> completed;
  if (opts.merge_z > 0.0) {
    completed = complete_near_cliques(graph.graph, cliques, corr.matrix, opts.merge_z * noise_scale(m.periods()));
    if (!completed.empty()) cliques = maximal_cliques(graph.graph);
  }

  FaOptions fa = opts.fa;
  fa.theta = opts.theta;
  Stage3Result s3 = stage3(m, cliques, fa);
  report.warnings.insert(report.warnings.end(), s3.warnings.begin(), s3.warnings.end());

  // stage3 returns a sorted set of sorted member lists.
  report.estimate = AssignmentMatrix::from_subsets(s3.subsets, m.slices());

  if (opts.record_intermediates) {
    report.intermediates =
        DetectionIntermediates{std::move(corr.matrix), std::move(graph.graph), std::move(completed),
                               std::move(graph.split), std::move(cliques), std::move(s3.fits)};
  }
  return report;
}

}  // namespace nsinterf
