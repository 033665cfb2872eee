// End-to-end detector: correlation -> interference graph -> maximal cliques
// -> per-clique factor analysis -> estimated assignment matrix.
#pragma once

#include "nsinterf/correlation.hpp"
#include "nsinterf/factor_analysis.hpp"
#include "nsinterf/graph.hpp"
#include "nsinterf/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nsinterf {

struct DetectorOptions {
  CorrelationVariant variant = CorrelationVariant::srcc;
  double theta = 0.5;  // in (0, 1]
  /// Graph edges also need a coefficient of at least edge_z / sqrt(T - 1);
  /// 0 keeps the plain two-cluster split.
  double edge_z = 2.5;
  /// Near-clique completion (complete_near_cliques) at merge_z / sqrt(T - 1);
  /// 0 disables it.
  double merge_z = 2.0;
  FaOptions fa;
  bool record_intermediates = false;

  void validate() const;
};

struct DetectionIntermediates {
  CorrelationMatrix correlation;
  /// The graph the cliques come from: the stage-1 graph plus completed edges.
  InterferenceGraph graph;
  std::vector<Edge> completed_edges;
  ClusterSplit split;
  CliqueList cliques;
  std::vector<CliqueFit> fits;
};

struct DetectionReport {
  /// J x N, rows distinct with >= 2 ones, lexicographic row order
  /// (compared as sorted member lists).
  AssignmentMatrix estimate;
  CorrelationVariant variant = CorrelationVariant::srcc;
  double theta = 0.5;
  std::optional<DetectionIntermediates> intermediates;
  std::vector<std::string> warnings;
};

/// `graph` without the completed edges.
InterferenceGraph stage1_graph(const DetectionIntermediates& im);

/// Stage 1 alone: coefficient clustering with the significance floor.
GraphResult stage1(const CorrelationMatrix& c, int periods, const DetectorOptions& opts);

DetectionReport detect(const KpiMatrix& m, const DetectorOptions& opts = {});

}  // namespace nsinterf
