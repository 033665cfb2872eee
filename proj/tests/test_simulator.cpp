#include "fixtures.hpp"
#include "nsinterf/simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace nsinterf;

namespace {

SimConfig pair_config(int periods, std::uint64_t seed) {
  SimConfig c;
  c.n_slices = 2;
  c.n_resources = 1;
  c.n_periods = periods;
  c.seed = seed;
  return c;
}

// Stationary distribution by power iteration.
Vector stationary(const Matrix& p) {
  Vector pi = Vector::Constant(p.rows(), 1.0 / static_cast<double>(p.rows()));
  for (int it = 0; it < 10000; ++it) {
    Vector next = p.transpose() * pi;
    if ((next - pi).cwiseAbs().maxCoeff() < 1e-15) return next;
    pi = next;
  }
  return pi;
}

double variance(const Vector& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("transition matrices are row-stochastic with sorted off-diagonals") {
  SimConfig c = pair_config(10, 0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto t = gen_transition_matrix(rng, c);
    REQUIRE(t.probs.rows() == 4);
    for (int r = 0; r < 4; ++r) {
      CHECK(std::abs(t.probs.row(r).sum() - 1.0) <= 1e-12);
      CHECK(t.probs(r, r) == doctest::Approx(0.25));
      double prev = 2.0;
      for (int col = 0; col < 4; ++col) {
        if (col == r) continue;
        CHECK(t.probs(r, col) >= 0.0);
        CHECK(t.probs(r, col) <= prev);
        prev = t.probs(r, col);
      }
    }
  }
}

TEST_CASE("gen_assignment yields valid matrices for both scenario sizes") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto small = gen_assignment(3, 2, rng);
    CHECK(small.resources() == 2);
    CHECK(validate_assignment(small).ok());
    const auto s1 = gen_assignment(50, 15, rng, 0.15);
    CHECK(s1.resources() == 15);
    CHECK(s1.slices() == 50);
    CHECK(validate_assignment(s1).ok());
    const auto s2 = gen_assignment(20, 6, rng, 0.3);
    CHECK(validate_assignment(s2).ok());
  }
  // Three slices admit only four distinct rows of weight >= 2.
  CHECK_THROWS_AS(gen_assignment(3, 5, rng), Error);
  CHECK_THROWS_AS(gen_assignment(1, 1, rng), Error);
}

TEST_CASE("resource utilization averages the sharers") {
  const auto pair = AssignmentMatrix::from_rows({{1, 1, 0}});
  CHECK(resource_utilization(pair, Vector{{0.2, 0.9, 0.5}})[0] == doctest::Approx(0.55));

  const auto nested = AssignmentMatrix::from_rows(testing::nested_rows());
  const Vector u{{0.2, 0.5, 0.9}};
  const Vector v = resource_utilization(nested, u);
  CHECK(v[0] == doctest::Approx((0.2 + 0.5 + 0.9) / 3.0).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(0.35).epsilon(1e-14));

  const Vector flat = resource_utilization(nested, Vector::Constant(3, 0.7));
  CHECK(flat[0] == doctest::Approx(0.7));
  CHECK(flat[1] == doctest::Approx(0.7));
}

TEST_CASE("delay shaping functions") {
  CHECK(delay_g(0.6) == 0.0);
  CHECK(delay_g(0.9) == doctest::Approx(0.09));
  CHECK(delay_h(0.5) == 0.0);
  CHECK(delay_h(0.9) == doctest::Approx(0.0625));
}

TEST_CASE("noise-free delay matches the hand computation") {
  const auto nested = AssignmentMatrix::from_rows(testing::nested_rows());
  SimConfig c;
  c.n_slices = 3;
  c.n_resources = 2;
  c.n_periods = 5;
  c.weight_shared = 0.3;
  c.noise_variance = 0.0;
  Rng rng(1);
  const Vector d = e2e_delay(nested, Vector{{0.9, 0.9, 0.2}}, c, rng);
  const double g0 = std::pow(2.0 / 3.0 - 0.6, 2), g1 = 0.09;
  CHECK(d[0] == doctest::Approx(0.3 * (g0 + g1) + 0.7 * 0.0625).epsilon(1e-12));
  CHECK(d[0] == doctest::Approx(0.0720833).epsilon(1e-6));
  CHECK(d[1] == doctest::Approx(d[0]));
  CHECK(d[2] == doctest::Approx(0.3 * g0).epsilon(1e-12));

  c.noise_variance = 0.1;
  const Vector quiet = e2e_delay(nested, Vector{{0.2, 0.5, 0.5}}, c, rng);
  CHECK(quiet.cwiseAbs().maxCoeff() == 0.0);

  // Without shared weight a slice only sees its own load.
  c.weight_shared = 0.0;
  c.noise_variance = 0.0;
  const Vector own = e2e_delay(nested, Vector{{0.9, 0.2, 0.2}}, c, rng);
  CHECK(own[0] == doctest::Approx(0.0625));
  CHECK(own[1] == 0.0);
  CHECK(own[2] == 0.0);
}

TEST_CASE("multiplicative noise is unbiased around the base") {
  const auto a = AssignmentMatrix::from_rows({{1, 1}});
  SimConfig c = pair_config(10, 3);
  c.noise_variance = 0.1;
  const Vector u{{0.9, 0.8}};
  const Vector base = base_delay(a, u, c);
  Rng rng(99);
  Vector sum = Vector::Zero(2);
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) sum += e2e_delay(a, u, c, rng);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(sum[i] / reps - base[i]) / base[i] < 0.05);
}

TEST_CASE("simulate is deterministic, nonnegative and sized by the config") {
  SimConfig c;
  c.n_slices = 3;
  c.n_resources = 2;
  c.n_periods = 5;
  c.noise_variance = 0.1;
  c.seed = 42;
  const auto a = simulate(c);
  const auto b = simulate(c);
  CHECK(a.measurements.values() == b.measurements.values());
  CHECK(a.truth == b.truth);
  CHECK(validate_assignment(a.truth).ok());

  const auto s1 = simulate(SimConfig::scenario1(1000, 0.3, 0.1, 7));
  CHECK(s1.measurements.periods() == 1000);
  CHECK(s1.measurements.slices() == 50);
  CHECK(s1.truth.resources() == 15);
  CHECK(s1.measurements.values().minCoeff() >= 0.0);

  c.seed = 43;
  CHECK_FALSE(simulate(c).measurements.values() == a.measurements.values());
}

TEST_CASE("invalid configs are rejected with the field name") {
  SimConfig c = pair_config(10, 1);
  c.diag_prob = 0.3;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("diag_prob"), Error);
  c = pair_config(10, 1);
  c.utilization_levels = {0.5, 0.2};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("utilization_levels"), Error);
  c = pair_config(10, 1);
  c.exp_averaging = 1.5;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("exp_averaging"), Error);
  c = pair_config(10, 1);
  c.weight_shared = 1.2;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("weight_shared"), Error);
}

TEST_CASE("chain occupancy matches the stationary distribution") {
  SimConfig c = pair_config(50000, 11);
  const auto truth = AssignmentMatrix::from_rows({{1, 1}});
  // The first chain is the first matrix drawn from the run's stream.
  Rng rng(c.seed);
  const auto t = gen_transition_matrix(rng, c);
  const Vector pi = stationary(t.probs);

  const auto out = simulate_with_assignment(c, truth);
  REQUIRE(out.utilization_trace.has_value());
  const Vector col = out.utilization_trace->col(0);
  for (std::size_t s = 0; s < c.utilization_levels.size(); ++s) {
    const double level = c.utilization_levels[s];
    const double freq = (col.array() == level).cast<double>().mean();
    CHECK(std::abs(freq - pi[static_cast<Eigen::Index>(s)]) < 0.02);
  }
}

TEST_CASE("exponential averaging stays within the levels and lowers variance") {
  SimConfig c = pair_config(10000, 21);
  const auto raw = simulate(c);
  c.exp_averaging = 0.7;
  const auto smooth = simulate(c);
  const Matrix& tr = *smooth.utilization_trace;
  CHECK(tr.minCoeff() >= 0.2 - 1e-12);
  CHECK(tr.maxCoeff() <= 0.9 + 1e-12);
  for (int i = 0; i < 2; ++i) {
    CHECK(variance(tr.col(i)) < variance(raw.utilization_trace->col(i)));
  }
}

TEST_CASE("fixed delay is additive and broadcast") {
  SimConfig c = pair_config(5, 1);
  c.fixed_delay = {0.5};
  CHECK(c.fixed_delay_for(0) == 0.5);
  CHECK(c.fixed_delay_for(1) == 0.5);
  c.fixed_delay = {0.1, 0.2};
  CHECK(c.fixed_delay_for(1) == 0.2);
  const auto a = AssignmentMatrix::from_rows({{1, 1}});
  c.noise_variance = 0.0;
  Rng rng(1);
  const Vector d = e2e_delay(a, Vector{{0.2, 0.2}}, c, rng);
  CHECK(d[0] == doctest::Approx(0.1));
  CHECK(d[1] == doctest::Approx(0.2));
}
