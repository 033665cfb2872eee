#include "nsinterf/factor_analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nsinterf;

namespace {

// T x p data drawn as f * L (+ noise), one row of `loadings` per factor.
Matrix planted(const Matrix& loadings, int t, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto q = loadings.rows(), p = loadings.cols();
  Matrix x(t, p);
  for (int r = 0; r < t; ++r) {
    Vector f(q);
    for (auto& v : f) v = z(rng);
    for (Eigen::Index c = 0; c < p; ++c) x(r, c) = f.dot(loadings.col(c)) + noise * z(rng);
  }
  return x;
}

double cosine(const Vector& a, const Vector& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

FactorModel manual_model(const Matrix& loadings) {
  FactorModel m;
  m.loadings = loadings;
  m.q = static_cast<int>(loadings.rows());
  m.uniquenesses = Vector::Constant(loadings.cols(), 0.1);
  return m;
}

void check_monotone(const FactorModel& m) {
  REQUIRE(m.trace.size() >= 2);
  for (std::size_t k = 1; k < m.trace.size(); ++k) CHECK(m.trace[k] >= m.trace[k - 1] - 1e-9);
}

}  // namespace

TEST_CASE("ledermann bound arithmetic") {
  CHECK(ledermann_bound(2) == 0);
  CHECK(ledermann_bound(3) == 1);
  CHECK(ledermann_bound(4) == 1);
  CHECK(ledermann_bound(5) == 2);
  CHECK(ledermann_bound(6) == 3);
  CHECK(ledermann_bound(10) == 6);
}

TEST_CASE("fit_fa recovers a planted rank-1 loading") {
  Matrix l(1, 4);
  l << 0.9, 0.7, 0.8, 0.6;
  const Matrix x = planted(l, 2000, 0.05, 1);
  const auto m = fit_fa(x, 1);
  CHECK(m.q == 1);
  CHECK(m.converged);
  const Vector raw = m.loadings.row(0).transpose().cwiseProduct(m.scale);
  CHECK(cosine(raw, l.row(0).transpose()) > 0.99);
  CHECK(raw.cwiseAbs().isApprox(l.row(0).transpose(), 0.05));
  CHECK((m.uniquenesses.array() >= 1e-6).all());
  check_monotone(m);

  const Matrix cov = m.model_covariance();
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(Eigen::LLT<Matrix>(cov).info() == Eigen::Success);
}

TEST_CASE("fit_fa on pure noise gives a near-diagonal model") {
  const Matrix x = planted(Matrix::Zero(1, 5), 3000, 1.0, 2);
  const auto m = fit_fa(x, 1);
  const Matrix cov = m.model_covariance();
  const double mean_var = cov.diagonal().mean();
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(std::abs(cov(i, j)) < 0.05 * mean_var);
  check_monotone(m);
}

TEST_CASE("fit_fa argument checks") {
  const Matrix x = planted(Matrix::Ones(1, 4), 100, 0.5, 3);
  CHECK_THROWS_AS(fit_fa(x, 2), Error);  // bound is 1 for p = 4
  CHECK_THROWS_AS(fit_fa(x, 0), Error);
  CHECK_THROWS_AS(fit_fa(x.topRows(4), 1), Error);
  Matrix flat = x;
  flat.col(2).setConstant(1.0);
  CHECK_THROWS_AS(fit_fa(flat, 1), Error);
  // Two variables still get a single-factor fit.
  CHECK(fit_fa(x.leftCols(2), 1).q == 1);
}

TEST_CASE("EM log-likelihood never decreases") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int p = 3 + static_cast<int>(seed % 5);
    const int q = 1 + static_cast<int>(seed % std::max(1, ledermann_bound(p)));
    Matrix l(q, p);
    for (auto& v : l.reshaped()) v = u(rng);
    check_monotone(fit_fa(planted(l, 400, 0.5, seed + 100), q));
  }
}

TEST_CASE("select_q picks the planted factor count") {
  Matrix two(2, 6);
  two << 0.9, 0.8, 0.85, 0, 0, 0,
         0, 0, 0, 0.9, 0.8, 0.85;
  const auto m = select_q(planted(two, 2000, 0.4, 5));
  CHECK(m.q == 2);
  CHECK(m.q <= ledermann_bound(6));

  Matrix one(1, 5);
  one << 0.9, 0.8, 0.7, 0.85, 0.75;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) hits += select_q(planted(one, 1000, 0.5, seed)).q == 1;
  CHECK(hits >= 45);

  // p = 3 only admits q = 1.
  CHECK(select_q(planted(one.leftCols(3), 500, 0.5, 9)).q == 1);
}

TEST_CASE("varimax preserves the model covariance") {
  Matrix two(2, 6);
  two << 0.9, 0.8, 0.85, 0.1, 0, 0.2,
         0.1, 0, 0.3, 0.9, 0.8, 0.85;
  auto m = fit_fa(planted(two, 1500, 0.4, 6), 2);
  const Matrix before = m.model_covariance();
  m.loadings = varimax(m.loadings);
  CHECK((m.model_covariance() - before).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("loadings_to_subsets threshold rule") {
  Matrix one(1, 3);
  one << 0.9, 0.8, 0.85;
  CHECK(loadings_to_subsets(manual_model(one), {1, 2, 3}) == std::vector<IndexSet>{{1, 2, 3}});

  Matrix pairs(2, 3);
  pairs << 0.9, 0.9, 0.02,
           0.02, 0.9, 0.9;
  CHECK(loadings_to_subsets(manual_model(pairs), {1, 2, 3}) == std::vector<IndexSet>{{1, 2}, {2, 3}});

  Matrix lone(1, 3);
  lone << 0.9, 0.1, 0.05;
  CHECK(loadings_to_subsets(manual_model(lone), {4, 5, 6}).empty());

  // The threshold is relative, so scaling the loadings changes nothing.
  CHECK(loadings_to_subsets(manual_model(pairs * 3.0), {1, 2, 3}) ==
        loadings_to_subsets(manual_model(pairs), {1, 2, 3}));
  CHECK_THROWS_AS(loadings_to_subsets(manual_model(one), {1, 2}), Error);
}

TEST_CASE("stage3 unions subsets and keeps them inside their cliques") {
  Matrix l(1, 4);
  l << 0.9, 0.8, 0.85, 0.0;
  Matrix x = planted(l, 1500, 0.4, 8);
  x.array() += 5.0;  // measurements are nonnegative
  const KpiMatrix m(x.cwiseMax(0.0));
  // Plain per-clique rule; the quiet-period refinement targets thresholded
  // congestion and splits linear-Gaussian factors into pairs.
  FaOptions plain;
  plain.refine.enabled = false;

  CHECK(stage3(m, {}).subsets.empty());

  const auto r = stage3(m, {{0, 1, 2}, {0, 1}}, plain);
  REQUIRE(r.fits.size() == 2);
  for (const auto& fit : r.fits)
    for (const auto& s : fit.subsets)
      CHECK(std::includes(fit.clique.begin(), fit.clique.end(), s.begin(), s.end()));
  CHECK(r.subsets == std::vector<IndexSet>{{0, 1}, {0, 1, 2}});

  // Two cliques yielding the same subset contribute it once.
  const auto dup = stage3(m, {{0, 1, 2}, {0, 1, 2}}, plain);
  CHECK(dup.subsets == std::vector<IndexSet>{{0, 1, 2}});

  // Refined subsets also stay inside their cliques.
  for (const auto& fit : stage3(m, {{0, 1, 2}, {0, 1, 3}}).fits)
    for (const auto& s : fit.subsets)
      CHECK(std::includes(fit.clique.begin(), fit.clique.end(), s.begin(), s.end()));

  // Scaling a column leaves the subsets unchanged.
  Matrix scaled = m.values();
  scaled.col(1) *= 40.0;
  CHECK(stage3(KpiMatrix(scaled), {{0, 1, 2}}).subsets == stage3(m, {{0, 1, 2}}).subsets);
  CHECK(stage3(KpiMatrix(scaled), {{0, 1, 2}}, plain).subsets == stage3(m, {{0, 1, 2}}, plain).subsets);
}

TEST_CASE("stage3 drops a weak pair and reports failed cliques as warnings") {
  Matrix l(1, 3);
  l << 0.9, 0.8, 0.0;
  Matrix x = planted(l, 800, 0.5, 12);
  x.array() += 5.0;
  const KpiMatrix m(x.cwiseMax(0.0));
  const auto r = stage3(m, {{0, 2}, {1, 2}});
  CHECK(r.subsets.empty());

  FaOptions plain;
  plain.refine.enabled = false;
  CHECK(stage3(m, {{0, 2}}, plain).subsets == std::vector<IndexSet>{{0, 2}});

  Matrix flat = m.values();
  flat.col(2).setConstant(1.0);
  const auto bad = stage3(KpiMatrix(flat), {{0, 1, 2}}, plain);
  CHECK(bad.subsets.empty());
  CHECK(bad.warnings.size() == 1);
}
