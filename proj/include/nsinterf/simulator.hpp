// Synthetic end-to-end delay generator with a known resource-sharing ground
// truth. Each slice's utilization follows an independent Markov chain over a
// small set of utilization levels; a resource's utilization is the mean of
// its sharers' utilizations; the delay of a slice mixes a shared congestion
// term with its own load term and multiplicative Gaussian noise.
#pragma once

#include "nsinterf/model.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace nsinterf {

using Rng = std::mt19937_64;

struct SimConfig {
  int n_slices = 0;
  int n_resources = 0;
  int n_periods = 0;
  double weight_shared = 0.3;   // w_S
  double noise_variance = 0.1;  // sigma^2
  std::vector<double> utilization_levels{0.2, 0.5, 0.7, 0.9};
  double diag_prob = 0.25;
  double offdiag_row_sum = 0.75;
  double g_threshold = 0.6;
  double h_threshold = 0.65;
  std::optional<double> exp_averaging;  // alpha in (0, 1); disabled when empty
  /// Additive delay per slice: empty means 0 everywhere, one value is
  /// broadcast, otherwise exactly n_slices values.
  std::vector<double> fixed_delay;
  /// Bernoulli density knob for gen_assignment.
  double assignment_density = 0.15;
  std::uint64_t seed = 0;

  /// Throws Error(invalid_argument) naming the offending field.
  void validate() const;
  double fixed_delay_for(int slice) const;

  /// 50 slices sharing 15 resources.
  static SimConfig scenario1(int n_periods, double weight_shared, double noise_variance,
                             std::uint64_t seed);
  /// 20 slices sharing 6 resources.
  static SimConfig scenario2(int n_periods, double weight_shared, double noise_variance,
                             std::uint64_t seed);
};

/// Row-stochastic S x S chain transition matrix, S = number of levels.
struct TransitionMatrix {
  Matrix probs;
};

struct SimOutput {
  KpiMatrix measurements;
  AssignmentMatrix truth;
  /// Utilization that drove the delays (smoothed when exp_averaging is set).
  std::optional<Matrix> utilization_trace;
};

/// Off-diagonal Uniform(0,1) draws normalized to offdiag_row_sum, sorted so
/// that lower-index (lower-utilization) targets get larger probabilities,
/// diagonal fixed at diag_prob.
TransitionMatrix gen_transition_matrix(Rng& rng, const SimConfig& config);

/// Random assignment matrix satisfying every validate_assignment invariant.
/// Throws Error(infeasible) when the dimensions admit no valid matrix or
/// sampling keeps failing.
AssignmentMatrix gen_assignment(int n_slices, int n_resources, Rng& rng, double density = 0.15);

/// V[j] = mean of u over the sharers of resource j.
Vector resource_utilization(const AssignmentMatrix& a, const Vector& u);

/// max(0, x - threshold)^2
double delay_g(double x, double threshold = 0.6);
/// max(0, y - threshold)^2
double delay_h(double y, double threshold = 0.65);

/// Deterministic part of every slice's delay for one period.
Vector base_delay(const AssignmentMatrix& a, const Vector& u, const SimConfig& config);

/// One period of delays: max(0, base + fixed + base * Z), Z ~ N(0, sigma^2).
Vector e2e_delay(const AssignmentMatrix& a, const Vector& u, const SimConfig& config, Rng& rng);

/// Full generative run; bit-identical output for identical configs.
SimOutput simulate(const SimConfig& config);

/// Same as simulate() but with a caller-supplied ground truth.
SimOutput simulate_with_assignment(const SimConfig& config, const AssignmentMatrix& truth);

}  // namespace nsinterf
