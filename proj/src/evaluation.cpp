#include "nsinterf/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <thread>
#include <tuple>

namespace nsinterf {

namespace {

void require_same_width(const AssignmentMatrix& truth, const AssignmentMatrix& estimate) {
  if (truth.slices() != estimate.slices() && estimate.resources() > 0) {
    throw Error(ErrorKind::invalid_argument, "truth and estimate have different slice counts");
  }
}

bool rows_equal(const AssignmentMatrix& a, int ra, const AssignmentMatrix& b, int rb) {
  return a.entries().row(ra) == b.entries().row(rb);
}

bool row_dominates(const AssignmentMatrix& cover, int rc, const AssignmentMatrix& truth, int rt) {
  for (int i = 0; i < truth.slices(); ++i) {
    if (truth.at(rt, i) && !cover.at(rc, i)) return false;
  }
  return true;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ splitmix(v)); }

}  // namespace

double exact_fraction(const AssignmentMatrix& truth, const AssignmentMatrix& estimate) {
  require_same_width(truth, estimate);
  if (truth.resources() == 0) return 0.0;
  int hits = 0;
  for (int j = 0; j < truth.resources(); ++j) {
    for (int k = 0; k < estimate.resources(); ++k) {
      if (rows_equal(truth, j, estimate, k)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / truth.resources();
}

double covered_fraction(const AssignmentMatrix& truth, const AssignmentMatrix& estimate) {
  require_same_width(truth, estimate);
  if (truth.resources() == 0) return 0.0;
  int hits = 0;
  for (int j = 0; j < truth.resources(); ++j) {
    for (int k = 0; k < estimate.resources(); ++k) {
      if (row_dominates(estimate, k, truth, j)) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / truth.resources();
}

InterferenceGraph co_sharing_graph(const AssignmentMatrix& truth) {
  InterferenceGraph g(truth.slices());
  for (int j = 0; j < truth.resources(); ++j) {
    const IndexSet members = truth.row_support(j);
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) g.add_edge(members[a], members[b]);
    }
  }
  return g;
}

Stage1Errors stage1_errors(const AssignmentMatrix& truth, const InterferenceGraph& graph) {
  if (truth.slices() != graph.size()) {
    throw Error(ErrorKind::invalid_argument, "truth and graph have different slice counts");
  }
  const InterferenceGraph expected = co_sharing_graph(truth);
  Stage1Errors e;
  for (int i = 0; i < graph.size(); ++i) {
    for (int j = i + 1; j < graph.size(); ++j) {
      if (expected.has_edge(i, j) && !graph.has_edge(i, j)) ++e.missed;
      if (!expected.has_edge(i, j) && graph.has_edge(i, j)) ++e.false_pos;
    }
  }
  return e;
}

ScoreCard score(const AssignmentMatrix& truth, const DetectionReport& report) {
  ScoreCard card;
  card.exact_fraction = exact_fraction(truth, report.estimate);
  card.covered_fraction = covered_fraction(truth, report.estimate);
  card.estimated_count = report.estimate.resources();
  if (report.intermediates) {
    const Stage1Errors e = stage1_errors(truth, stage1_graph(*report.intermediates));
    card.stage1_missed = e.missed;
    card.stage1_false_pos = e.false_pos;
  }
  return card;
}

void SweepSpec::validate() const {
  if (replicates < 1) throw Error(ErrorKind::invalid_argument, "invalid sweep field 'replicates': must be >= 1");
  if (periods.empty()) throw Error(ErrorKind::invalid_argument, "invalid sweep field 'grid.n_periods': empty");
  if (weights_shared.empty()) {
    throw Error(ErrorKind::invalid_argument, "invalid sweep field 'grid.weight_shared': empty");
  }
  if (noise_variances.empty()) {
    throw Error(ErrorKind::invalid_argument, "invalid sweep field 'grid.noise_variance': empty");
  }
  if (variants.empty()) throw Error(ErrorKind::invalid_argument, "invalid sweep field 'grid.variant': empty");
  if (exp_averaging.empty()) {
    throw Error(ErrorKind::invalid_argument, "invalid sweep field 'grid.exp_averaging': empty");
  }
  if (threads < 0) throw Error(ErrorKind::invalid_argument, "invalid sweep field 'threads': negative");
  // Every grid point must form a valid simulation config.
  for (int t : periods) {
    for (double w : weights_shared) {
      for (double s2 : noise_variances) {
        for (const auto& alpha : exp_averaging) {
          SimConfig c = base;
          c.n_periods = t;
          c.weight_shared = w;
          c.noise_variance = s2;
          c.exp_averaging = alpha;
          c.validate();
        }
      }
    }
  }
  detector.validate();
}

std::uint64_t cell_seed(std::uint64_t base, int n_periods, double weight_shared,
                        double noise_variance, CorrelationVariant variant, int replicate) {
  std::uint64_t h = splitmix(base);
  h = mix(h, static_cast<std::uint64_t>(n_periods));
  h = mix(h, std::bit_cast<std::uint64_t>(weight_shared));
  h = mix(h, std::bit_cast<std::uint64_t>(noise_variance));
  h = mix(h, static_cast<std::uint64_t>(variant));
  h = mix(h, static_cast<std::uint64_t>(replicate));
  return h;
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  spec.validate();

  std::vector<SweepCell> cells;
  for (int t : spec.periods) {
    for (double w : spec.weights_shared) {
      for (double s2 : spec.noise_variances) {
        for (CorrelationVariant v : spec.variants) {
          for (const auto& alpha : spec.exp_averaging) {
            SweepCell cell;
            cell.n_periods = t;
            cell.weight_shared = w;
            cell.noise_variance = s2;
            cell.variant = v;
            cell.exp_averaging = alpha;
            cells.push_back(cell);
          }
        }
      }
    }
  }
  auto key = [](const SweepCell& c) {
    return std::make_tuple(c.n_periods, c.weight_shared, c.noise_variance, static_cast<int>(c.variant),
                           c.exp_averaging.has_value(), c.exp_averaging.value_or(0.0));
  };
  std::sort(cells.begin(), cells.end(), [&](const SweepCell& a, const SweepCell& b) { return key(a) < key(b); });

  struct Outcome {
    bool ok = false;
    ScoreCard card;
    std::string failure;
  };
  const std::size_t reps = static_cast<std::size_t>(spec.replicates);
  std::vector<Outcome> outcomes(cells.size() * reps);

  auto run_task = [&](std::size_t task) {
    const SweepCell& cell = cells[task / reps];
    const int rep = static_cast<int>(task % reps);
    Outcome& out = outcomes[task];
    try {
      SimConfig config = spec.base;
      config.n_periods = cell.n_periods;
      config.weight_shared = cell.weight_shared;
      config.noise_variance = cell.noise_variance;
      config.exp_averaging = cell.exp_averaging;
      config.seed = cell_seed(spec.seed, cell.n_periods, cell.weight_shared, cell.noise_variance,
                              cell.variant, rep);
      const SimOutput sim = simulate(config);
      DetectorOptions opts = spec.detector;
      opts.variant = cell.variant;
      opts.record_intermediates = true;
      const DetectionReport report = detect(sim.measurements, opts);
      out.card = score(sim.truth, report);
      out.ok = true;
    } catch (const std::exception& e) {
      out.failure = "replicate " + std::to_string(rep) + ": " + e.what();
    }
  };

  const std::size_t total = outcomes.size();
  unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  if (workers <= 1) {
    for (std::size_t task = 0; task < total; ++task) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t task = next++; task < total; task = next++) run_task(task);
      });
    }
  }

  for (std::size_t c = 0; c < cells.size(); ++c) {
    SweepCell& cell = cells[c];
    for (std::size_t r = 0; r < reps; ++r) {
      const Outcome& out = outcomes[c * reps + r];
      if (!out.ok) {
        ++cell.replicates_failed;
        cell.failures.push_back(out.failure);
        continue;
      }
      ++cell.replicates_ok;
      cell.mean_exact += out.card.exact_fraction;
      cell.mean_covered += out.card.covered_fraction;
      cell.mean_estimated_count += out.card.estimated_count;
      cell.mean_stage1_missed += out.card.stage1_missed;
      cell.mean_stage1_false_pos += out.card.stage1_false_pos;
    }
    if (cell.replicates_ok > 0) {
      const double n = cell.replicates_ok;
      cell.mean_exact /= n;
      cell.mean_covered /= n;
      cell.mean_estimated_count /= n;
      cell.mean_stage1_missed /= n;
      cell.mean_stage1_false_pos /= n;
    }
  }
  return cells;
}

std::string stage1_label(bool sharing, bool edge) {
  if (sharing) return edge ? "corr" : "missed";
  return edge ? "false_pos" : "uncorr";
}

CorrelationStudy correlation_study(const SimConfig& config, const DetectorOptions& opts) {
  const SimOutput sim = simulate(config);
  const CorrelationResult srcc = spearman_matrix(sim.measurements);
  const CorrelationResult pcc = pearson_matrix(sim.measurements);
  const int t = sim.measurements.periods();
  const InterferenceGraph srcc_graph = stage1(srcc.matrix, t, opts).graph;
  const InterferenceGraph pcc_graph = stage1(pcc.matrix, t, opts).graph;
  const InterferenceGraph truth_graph = co_sharing_graph(sim.truth);

  CorrelationStudy study;
  const int n = sim.measurements.slices();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      study.pairs.push_back({i, j, pcc.matrix(i, j), srcc.matrix(i, j), truth_graph.has_edge(i, j),
                             srcc_graph.has_edge(i, j), pcc_graph.has_edge(i, j)});
    }
  }
  const Stage1Errors es = stage1_errors(sim.truth, srcc_graph);
  const Stage1Errors ep = stage1_errors(sim.truth, pcc_graph);
  study.srcc_stage1.stage1_missed = es.missed;
  study.srcc_stage1.stage1_false_pos = es.false_pos;
  study.pcc_stage1.stage1_missed = ep.missed;
  study.pcc_stage1.stage1_false_pos = ep.false_pos;
  return study;
}

}  // namespace nsinterf
