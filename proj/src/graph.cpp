#include "nsinterf/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <set>

namespace nsinterf {

namespace {

class Bitset {
 public:
  explicit Bitset(int n) : words_((static_cast<std::size_t>(n) + 63) / 64, 0) {}

  void set(int i) { words_[static_cast<std::size_t>(i) >> 6] |= bit(i); }
  void reset(int i) { words_[static_cast<std::size_t>(i) >> 6] &= ~bit(i); }
  bool test(int i) const { return (words_[static_cast<std::size_t>(i) >> 6] & bit(i)) != 0; }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  int count_and(const Bitset& o) const {
    int c = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) c += std::popcount(words_[k] & o.words_[k]);
    return c;
  }
  Bitset operator&(const Bitset& o) const {
    Bitset r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
    return r;
  }
  Bitset operator|(const Bitset& o) const {
    Bitset r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] |= o.words_[k];
    return r;
  }
  Bitset minus(const Bitset& o) const {
    Bitset r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
    return r;
  }
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        const int b = std::countr_zero(w);
        f(static_cast<int>(k * 64) + b);
        w &= w - 1;
      }
    }
  }

 private:
  static std::uint64_t bit(int i) { return std::uint64_t{1} << (static_cast<unsigned>(i) & 63u); }
  std::vector<std::uint64_t> words_;
};

struct CliqueSearch {
  std::vector<Bitset> adj;
  CliqueList out;

  void expand(IndexSet& r, Bitset p, Bitset x) {
    if (p.none() && x.none()) {
      if (r.size() >= 2) {
        IndexSet c = r;
        std::sort(c.begin(), c.end());
        out.push_back(std::move(c));
      }
      return;
    }
    // Pivot maximizing |P ∩ N(u)| over u in P ∪ X.
    int pivot = -1;
    int best = -1;
    (p | x).for_each([&](int u) {
      const int c = p.count_and(adj[static_cast<std::size_t>(u)]);
      if (c > best) {
        best = c;
        pivot = u;
      }
    });
    const Bitset candidates = p.minus(adj[static_cast<std::size_t>(pivot)]);
    candidates.for_each([&](int v) {
      const Bitset& nv = adj[static_cast<std::size_t>(v)];
      r.push_back(v);
      expand(r, p & nv, x & nv);
      r.pop_back();
      p.reset(v);
      x.set(v);
    });
  }
};

}  // namespace

ClusterSplit kmeans_1d(std::span<const double> values, int max_iter) {
  if (values.empty()) throw Error(ErrorKind::degenerate, "no values to cluster");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  ClusterSplit split;
  split.low = *lo_it;
  split.high = *hi_it;
  if (!(split.high > split.low)) {
    throw Error(ErrorKind::degenerate, "all values identical; no two-cluster split exists");
  }
  split.labels.assign(values.size(), 0);
  bool first = true;
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = first;
    first = false;
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double v = values[k];
      const std::uint8_t label = std::abs(v - split.high) < std::abs(v - split.low) ? 1 : 0;
      if (label != split.labels[k]) {
        split.labels[k] = label;
        changed = true;
      }
      sum[label] += v;
      ++count[label];
    }
    split.iterations = iter + 1;
    if (!changed) break;
    // min stays in cluster 0 and max in cluster 1, so neither is empty
    split.low = sum[0] / static_cast<double>(count[0]);
    split.high = sum[1] / static_cast<double>(count[1]);
  }
  // Lloyd can stall in a local optimum (flat or heavily tied inputs). Both
  // clusters of any optimum are intervals, so the best split point of the
  // sorted values is found exactly with prefix sums.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const std::size_t n = values.size();
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = values[order[k]];
    s1[k + 1] = s1[k] + v;
    s2[k + 1] = s2[k] + v * v;
  }
  auto cost = [&](std::size_t b, std::size_t e) {
    const double m = static_cast<double>(e - b);
    const double t = s1[e] - s1[b];
    return (s2[e] - s2[b]) - t * t / m;
  };
  std::size_t best_cut = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < n; ++k) {
    if (values[order[k]] == values[order[k - 1]]) continue;
    const double c = cost(0, k) + cost(k, n);
    if (c < best) {
      best = c;
      best_cut = k;
    }
  }
  double current = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double centre = split.labels[k] ? split.high : split.low;
    current += (values[k] - centre) * (values[k] - centre);
  }
  if (best_cut > 0 && best < current - 1e-12 * std::max(1.0, current)) {
    for (std::size_t k = 0; k < n; ++k) split.labels[order[k]] = k >= best_cut ? 1 : 0;
    split.low = s1[best_cut] / static_cast<double>(best_cut);
    split.high = (s1[n] - s1[best_cut]) / static_cast<double>(n - best_cut);
  }
  return split;
}

GraphResult build_interference_graph(const CorrelationMatrix& c, double min_coefficient) {
  const int n = c.size();
  GraphResult result{InterferenceGraph(n), {}, {}};
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n > 0 ? n - 1 : 0) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) values.push_back(c(i, j));
  }
  try {
    result.split = kmeans_1d(values);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate) throw;
    result.warnings.push_back(std::string("coefficient clustering degenerate (") + e.what() +
                              "); no interference detected");
    return result;
  }
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (result.split.labels[k++] && c(i, j) >= min_coefficient) result.graph.add_edge(i, j);
    }
  }
  return result;
}

std::vector<Edge> complete_near_cliques(InterferenceGraph& g, const CliqueList& cliques,
                                        const CorrelationMatrix& c, double min_coefficient) {
  std::set<Edge> added;
  for (std::size_t a = 0; a < cliques.size(); ++a) {
    for (std::size_t b = a + 1; b < cliques.size(); ++b) {
      const IndexSet& ca = cliques[a];
      const IndexSet& cb = cliques[b];
      if (ca.size() != cb.size()) continue;
      IndexSet odd;
      std::set_symmetric_difference(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(odd));
      if (odd.size() != 2 || g.has_edge(odd[0], odd[1])) continue;
      if (c(odd[0], odd[1]) >= min_coefficient) added.insert({odd[0], odd[1]});
    }
  }
  for (const auto& [i, j] : added) g.add_edge(i, j);
  return {added.begin(), added.end()};
}

DegeneracyOrder degeneracy_order(const InterferenceGraph& g) {
  const int n = g.size();
  std::vector<int> degree(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) degree[static_cast<std::size_t>(i)] = g.degree(i);
  std::vector<bool> removed(static_cast<std::size_t>(n), false);
  DegeneracyOrder result;
  result.order.reserve(static_cast<std::size_t>(n));
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    int best = std::numeric_limits<int>::max();
    for (int i = 0; i < n; ++i) {
      if (!removed[static_cast<std::size_t>(i)] && degree[static_cast<std::size_t>(i)] < best) {
        best = degree[static_cast<std::size_t>(i)];
        pick = i;
      }
    }
    result.degeneracy = std::max(result.degeneracy, best);
    removed[static_cast<std::size_t>(pick)] = true;
    result.order.push_back(pick);
    for (int j = 0; j < n; ++j) {
      if (g.has_edge(pick, j) && !removed[static_cast<std::size_t>(j)]) {
        --degree[static_cast<std::size_t>(j)];
      }
    }
  }
  return result;
}

CliqueList maximal_cliques(const InterferenceGraph& g) {
  const int n = g.size();
  CliqueSearch search;
  search.adj.assign(static_cast<std::size_t>(n), Bitset(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.has_edge(i, j)) search.adj[static_cast<std::size_t>(i)].set(j);
    }
  }
  const DegeneracyOrder dg = degeneracy_order(g);
  std::vector<int> position(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) position[static_cast<std::size_t>(dg.order[static_cast<std::size_t>(k)])] = k;

  for (int v : dg.order) {
    Bitset later(n);
    Bitset earlier(n);
    search.adj[static_cast<std::size_t>(v)].for_each([&](int u) {
      if (position[static_cast<std::size_t>(u)] > position[static_cast<std::size_t>(v)]) {
        later.set(u);
      } else {
        earlier.set(u);
      }
    });
    IndexSet r{v};
    search.expand(r, later, earlier);
  }
  std::sort(search.out.begin(), search.out.end());
  return std::move(search.out);
}

}  // namespace nsinterf
