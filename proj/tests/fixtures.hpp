// Shared helpers for the unit and acceptance tests.
#pragma once

#include "nsinterf/evaluation.hpp"
#include "nsinterf/model.hpp"
#include "nsinterf/simulator.hpp"

#include <algorithm>
#include <vector>

namespace nsinterf::testing {

inline std::vector<std::vector<int>> nested_rows() { return {{1, 1, 1}, {1, 1, 0}}; }
inline std::vector<std::vector<int>> triangle_rows() { return {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}; }

/// Places a small sharing pattern on the first slices and appends `pairs`
/// independent background pairs. With only three slices the two-way split
/// of three coefficients always drops one of them, so the planted patterns
/// need some unrelated traffic to be identifiable.
inline AssignmentMatrix embed(std::vector<std::vector<int>> rows, int pairs = 4) {
  const int n0 = static_cast<int>(rows.front().size());
  const int n = n0 + 2 * pairs;
  for (auto& r : rows) r.resize(static_cast<std::size_t>(n), 0);
  for (int b = 0; b < pairs; ++b) {
    std::vector<int> r(static_cast<std::size_t>(n), 0);
    r[static_cast<std::size_t>(n0 + 2 * b)] = 1;
    r[static_cast<std::size_t>(n0 + 2 * b + 1)] = 1;
    rows.push_back(r);
  }
  return AssignmentMatrix::from_rows(rows);
}

inline SimConfig strong_config(const AssignmentMatrix& a, std::uint64_t seed) {
  SimConfig c;
  c.n_slices = a.slices();
  c.n_resources = a.resources();
  c.n_periods = 2000;
  c.weight_shared = 0.5;
  c.noise_variance = 0.0;
  c.seed = seed;
  return c;
}

/// Estimate rows as sorted member lists.
inline std::vector<IndexSet> row_sets(const AssignmentMatrix& a) {
  std::vector<IndexSet> out;
  for (int j = 0; j < a.resources(); ++j) out.push_back(a.row_support(j));
  std::sort(out.begin(), out.end());
  return out;
}

inline bool is_clique(const InterferenceGraph& g, const IndexSet& s) {
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b)
      if (!g.has_edge(s[a], s[b])) return false;
  return true;
}

/// Every maximal clique of size >= 2 by subset enumeration (n <= ~16).
inline CliqueList brute_force_cliques(const InterferenceGraph& g) {
  const int n = g.size();
  std::vector<std::uint32_t> cliques;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    IndexSet s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    if (s.size() >= 2 && is_clique(g, s)) cliques.push_back(mask);
  }
  CliqueList out;
  for (auto m : cliques) {
    bool maximal = true;
    for (int v = 0; v < n && maximal; ++v) {
      if (m & (1u << v)) continue;
      bool adjacent_to_all = true;
      for (int i = 0; i < n; ++i)
        if ((m & (1u << i)) && !g.has_edge(i, v)) adjacent_to_all = false;
      if (adjacent_to_all) maximal = false;
    }
    if (!maximal) continue;
    IndexSet s;
    for (int i = 0; i < n; ++i)
      if (m & (1u << i)) s.push_back(i);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nsinterf::testing
