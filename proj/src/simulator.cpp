#include "nsinterf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace nsinterf {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::invalid_argument, "invalid config field '" + field + "': " + why);
}

// Count of distinct 0/1 rows with at least two ones, saturated.
double distinct_row_capacity(int n_slices) {
  if (n_slices >= 60) return 1e18;
  return std::ldexp(1.0, n_slices) - n_slices - 1;
}

// Uniform pick among the rows with the fewest ones.
int lightest_row(const BinaryMatrix& m, Rng& rng) {
  const Eigen::VectorXi weights = m.cast<int>().rowwise().sum();
  const int lightest = weights.minCoeff();
  std::vector<int> candidates;
  for (int j = 0; j < static_cast<int>(weights.size()); ++j) {
    if (weights[j] == lightest) candidates.push_back(j);
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

}  // namespace

void SimConfig::validate() const {
  if (n_slices < 2) bad_field("n_slices", "must be at least 2");
  if (n_resources < 1) bad_field("n_resources", "must be at least 1");
  if (n_periods < 2) bad_field("n_periods", "must be at least 2");
  if (!(weight_shared >= 0.0 && weight_shared <= 1.0)) bad_field("weight_shared", "must lie in [0, 1]");
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    bad_field("noise_variance", "must be a finite nonnegative value");
  }
  if (utilization_levels.size() < 2) bad_field("utilization_levels", "needs at least two levels");
  for (std::size_t s = 0; s < utilization_levels.size(); ++s) {
    const double u = utilization_levels[s];
    if (!(u >= 0.0 && u <= 1.0)) bad_field("utilization_levels", "levels must lie in [0, 1]");
    if (s > 0 && !(u > utilization_levels[s - 1])) {
      bad_field("utilization_levels", "levels must be strictly increasing");
    }
  }
  if (!(diag_prob >= 0.0 && diag_prob <= 1.0)) bad_field("diag_prob", "must lie in [0, 1]");
  if (std::abs(diag_prob + offdiag_row_sum - 1.0) > 1e-12) {
    bad_field("offdiag_row_sum", "diag_prob + offdiag_row_sum must equal 1");
  }
  if (exp_averaging && !(*exp_averaging > 0.0 && *exp_averaging < 1.0)) {
    bad_field("exp_averaging", "alpha must lie in (0, 1)");
  }
  if (!fixed_delay.empty() && fixed_delay.size() != 1 &&
      fixed_delay.size() != static_cast<std::size_t>(n_slices)) {
    bad_field("fixed_delay", "expected one value or one per slice");
  }
  for (double f : fixed_delay) {
    if (!(f >= 0.0) || !std::isfinite(f)) bad_field("fixed_delay", "must be finite and nonnegative");
  }
  if (!(assignment_density > 0.0 && assignment_density <= 1.0)) {
    bad_field("assignment_density", "must lie in (0, 1]");
  }
}

double SimConfig::fixed_delay_for(int slice) const {
  if (fixed_delay.empty()) return 0.0;
  if (fixed_delay.size() == 1) return fixed_delay.front();
  return fixed_delay[static_cast<std::size_t>(slice)];
}

SimConfig SimConfig::scenario1(int n_periods, double weight_shared, double noise_variance,
                               std::uint64_t seed) {
  SimConfig c;
  c.n_slices = 50;
  c.n_resources = 15;
  c.n_periods = n_periods;
  c.weight_shared = weight_shared;
  c.noise_variance = noise_variance;
  c.assignment_density = 0.15;
  c.seed = seed;
  return c;
}

SimConfig SimConfig::scenario2(int n_periods, double weight_shared, double noise_variance,
                               std::uint64_t seed) {
  SimConfig c = scenario1(n_periods, weight_shared, noise_variance, seed);
  c.n_slices = 20;
  c.n_resources = 6;
  c.assignment_density = 0.3;
  return c;
}

TransitionMatrix gen_transition_matrix(Rng& rng, const SimConfig& config) {
  const auto states = static_cast<Eigen::Index>(config.utilization_levels.size());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix probs = Matrix::Zero(states, states);
  std::vector<double> off;
  for (Eigen::Index r = 0; r < states; ++r) {
    off.clear();
    for (Eigen::Index c = 0; c < states; ++c) {
      if (c != r) off.push_back(unif(rng));
    }
    double sum = 0.0;
    for (double v : off) sum += v;
    for (double& v : off) v *= config.offdiag_row_sum / sum;
    std::sort(off.begin(), off.end(), std::greater<>());
    std::size_t next = 0;
    for (Eigen::Index c = 0; c < states; ++c) {
      probs(r, c) = (c == r) ? config.diag_prob : off[next++];
    }
  }
  return {probs};
}

AssignmentMatrix gen_assignment(int n_slices, int n_resources, Rng& rng, double density) {
  if (n_slices < 2 || n_resources < 1) {
    throw Error(ErrorKind::infeasible, "assignment needs at least 2 slices and 1 resource");
  }
  if (static_cast<double>(n_resources) > distinct_row_capacity(n_slices)) {
    std::ostringstream msg;
    msg << "cannot build " << n_resources << " distinct shared resources over " << n_slices
        << " slices";
    throw Error(ErrorKind::infeasible, msg.str());
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "assignment density must lie in (0, 1]");
  }

  const double row_weight =
      std::max(2.0, static_cast<double>(n_slices) / n_resources * density);
  const double p = std::min(1.0, row_weight / n_slices);
  std::bernoulli_distribution bit(p);
  std::uniform_int_distribution<int> pick_slice(0, n_slices - 1);

  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    BinaryMatrix m(n_resources, n_slices);
    for (int j = 0; j < n_resources; ++j) {
      for (int i = 0; i < n_slices; ++i) m(j, i) = bit(rng) ? 1 : 0;
    }
    for (int i = 0; i < n_slices; ++i) {
      if (m.col(i).cast<int>().sum() == 0) m(lightest_row(m, rng), i) = 1;
    }
    for (int j = 0; j < n_resources; ++j) {
      while (m.row(j).cast<int>().sum() < 2) m(j, pick_slice(rng)) = 1;
    }
    std::set<std::vector<std::uint8_t>> seen;
    bool distinct = true;
    for (int j = 0; j < n_resources && distinct; ++j) {
      std::vector<std::uint8_t> row(m.row(j).data(), m.row(j).data() + n_slices);
      distinct = seen.insert(std::move(row)).second;
    }
    if (distinct) return AssignmentMatrix(std::move(m));
  }
  throw Error(ErrorKind::infeasible, "could not sample an assignment with distinct rows");
}

Vector resource_utilization(const AssignmentMatrix& a, const Vector& u) {
  if (u.size() != a.slices()) {
    throw Error(ErrorKind::invalid_argument, "utilization vector length must equal slice count");
  }
  Vector v(a.resources());
  for (int j = 0; j < a.resources(); ++j) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < a.slices(); ++i) {
      if (a.at(j, i)) {
        sum += u[i];
        ++count;
      }
    }
    v[j] = count > 0 ? sum / count : 0.0;
  }
  return v;
}

double delay_g(double x, double threshold) {
  const double over = std::max(0.0, x - threshold);
  return over * over;
}

double delay_h(double y, double threshold) {
  const double over = std::max(0.0, y - threshold);
  return over * over;
}

Vector base_delay(const AssignmentMatrix& a, const Vector& u, const SimConfig& config) {
  const Vector v = resource_utilization(a, u);
  Vector shared = Vector::Zero(a.slices());
  for (int j = 0; j < a.resources(); ++j) {
    const double gj = delay_g(v[j], config.g_threshold);
    if (gj == 0.0) continue;
    for (int i = 0; i < a.slices(); ++i) {
      if (a.at(j, i)) shared[i] += gj;
    }
  }
  Vector base(a.slices());
  for (int i = 0; i < a.slices(); ++i) {
    base[i] = config.weight_shared * shared[i] +
              (1.0 - config.weight_shared) * delay_h(u[i], config.h_threshold);
  }
  return base;
}

Vector e2e_delay(const AssignmentMatrix& a, const Vector& u, const SimConfig& config, Rng& rng) {
  const Vector base = base_delay(a, u, config);
  std::normal_distribution<double> z(0.0, std::sqrt(config.noise_variance));
  Vector d(a.slices());
  for (int i = 0; i < a.slices(); ++i) {
    // Always draw so the random stream does not depend on the data.
    const double noise = config.fixed_delay_for(i) + base[i] * z(rng);
    d[i] = std::max(0.0, base[i] + noise);
  }
  return d;
}

SimOutput simulate(const SimConfig& config) {
  config.validate();
  Rng rng(config.seed);
  AssignmentMatrix truth =
      gen_assignment(config.n_slices, config.n_resources, rng, config.assignment_density);
  // The chains draw from a separate stream so a caller-supplied assignment
  // (simulate_with_assignment) sees the same dynamics as a sampled one.
  SimConfig rest = config;
  rest.seed = rng();
  return simulate_with_assignment(rest, truth);
}

SimOutput simulate_with_assignment(const SimConfig& config, const AssignmentMatrix& truth) {
  config.validate();
  if (truth.slices() != config.n_slices) {
    throw Error(ErrorKind::invalid_argument, "assignment slice count does not match n_slices");
  }
  Rng rng(config.seed);
  const int n = config.n_slices;
  const int t_len = config.n_periods;
  const auto states = static_cast<int>(config.utilization_levels.size());

  std::vector<TransitionMatrix> chains;
  chains.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) chains.push_back(gen_transition_matrix(rng, config));

  std::uniform_int_distribution<int> initial(0, states - 1);
  std::vector<int> state(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) state[static_cast<std::size_t>(i)] = initial(rng);

  Vector smoothed(n);
  for (int i = 0; i < n; ++i) {
    smoothed[i] = config.utilization_levels[static_cast<std::size_t>(state[static_cast<std::size_t>(i)])];
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix measurements(t_len, n);
  Matrix trace(t_len, n);
  Vector u(n);
  for (int k = 0; k < t_len; ++k) {
    for (int i = 0; i < n; ++i) {
      auto& s = state[static_cast<std::size_t>(i)];
      const auto& probs = chains[static_cast<std::size_t>(i)].probs;
      const double draw = unif(rng);
      double acc = 0.0;
      int next = states - 1;
      for (int c = 0; c < states; ++c) {
        acc += probs(s, c);
        if (draw < acc) {
          next = c;
          break;
        }
      }
      s = next;
      const double level = config.utilization_levels[static_cast<std::size_t>(s)];
      if (config.exp_averaging) {
        const double alpha = *config.exp_averaging;
        smoothed[i] = alpha * level + (1.0 - alpha) * smoothed[i];
        u[i] = smoothed[i];
      } else {
        u[i] = level;
      }
    }
    trace.row(k) = u.transpose();
    measurements.row(k) = e2e_delay(truth, u, config, rng).transpose();
  }
  return SimOutput{KpiMatrix(std::move(measurements)), truth, std::move(trace)};
}

}  // namespace nsinterf
