// Interference graph construction (two-way split of the pairwise
// coefficients) and maximal clique enumeration.
#pragma once

#include "nsinterf/model.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nsinterf {

/// Two-cluster partition of a set of reals. Label 1 marks the cluster with
/// the larger centroid.
struct ClusterSplit {
  std::vector<std::uint8_t> labels;
  double low = 0.0;
  double high = 0.0;
  int iterations = 0;

  double threshold() const noexcept { return 0.5 * (low + high); }
};

/// Lloyd's 2-means in one dimension, seeded at (min, max). Stops when no
/// label changes or after `max_iter` rounds; if that fixed point is only a
/// local optimum the exact best split of the sorted values replaces it.
/// Throws Error(degenerate) when fewer than two distinct values are present.
ClusterSplit kmeans_1d(std::span<const double> values, int max_iter = 200);

struct GraphResult {
  InterferenceGraph graph;
  ClusterSplit split;  // empty labels when the split was degenerate
  std::vector<std::string> warnings;
};

/// Clusters the upper-triangle coefficients and links every pair that lands
/// in the high cluster and reaches `min_coefficient`. A degenerate split
/// yields an empty graph and a warning.
GraphResult build_interference_graph(const CorrelationMatrix& c,
                                     double min_coefficient = -std::numeric_limits<double>::infinity());

using Edge = std::pair<int, int>;

/// For two maximal cliques of equal size that differ in one vertex each, adds
/// the edge between the odd vertices when their coefficient reaches
/// `min_coefficient`. Returns the added edges (i < j), sorted.
std::vector<Edge> complete_near_cliques(InterferenceGraph& g, const CliqueList& cliques,
                                        const CorrelationMatrix& c, double min_coefficient);

struct DegeneracyOrder {
  std::vector<int> order;  // removal order
  int degeneracy = 0;
};

/// Repeated minimum-degree removal (lowest index on ties).
DegeneracyOrder degeneracy_order(const InterferenceGraph& g);

/// Every maximal clique with at least two vertices: Bron-Kerbosch with
/// pivoting, outer loop over the degeneracy order.
CliqueList maximal_cliques(const InterferenceGraph& g);

}  // namespace nsinterf
