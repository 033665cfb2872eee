#include "nsinterf/correlation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nsinterf;

namespace {

// Rank of x[i]: 1 + #smaller + (#equal - 1) / 2, by direct counting.
Vector rank_oracle(const Vector& x) {
  Vector r(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) ++less;
      if (x[j] == x[i]) ++equal;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

double pearson_oracle(const Vector& a, const Vector& b) {
  const double n = static_cast<double>(a.size());
  double ma = a.sum() / n, mb = b.sum() / n, sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

KpiMatrix two_columns(std::initializer_list<double> a, std::initializer_list<double> b) {
  Matrix m(static_cast<Eigen::Index>(a.size()), 2);
  Eigen::Index r = 0;
  for (double v : a) m(r++, 0) = v;
  r = 0;
  for (double v : b) m(r++, 1) = v;
  return KpiMatrix(m);
}

Matrix random_kpi(std::mt19937_64& rng, int t, int n, bool ties) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 4);
  Matrix m(t, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < t; ++r) m(r, c) = ties ? small(rng) : u(rng);
  // A shared component so coefficients are not all near zero.
  for (int r = 0; r < t; ++r) {
    const double z = u(rng);
    for (int c = 0; c < n; c += 2) m(r, c) += z;
  }
  for (int c = 0; c < n; ++c)
    if (m.col(c).maxCoeff() == m.col(c).minCoeff()) m(0, c) += 1.0;
  return m;
}

}  // namespace

TEST_CASE("rank_transform uses average ranks") {
  CHECK(rank_transform(Vector{{10, 20, 30}}) == Vector{{1, 2, 3}});
  CHECK(rank_transform(Vector{{5, 5, 1}}) == Vector{{2.5, 2.5, 1}});
  CHECK(rank_transform(Vector{{3, 1, 4, 1}}) == Vector{{3, 1.5, 4, 1.5}});
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x(30);
    for (auto& v : x) v = d(rng);
    CHECK((rank_transform(x) - rank_oracle(x)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spearman examples") {
  CHECK(spearman_matrix(two_columns({1, 2, 3}, {10, 20, 30})).matrix(0, 1) == doctest::Approx(1.0));
  CHECK(spearman_matrix(two_columns({1, 2, 3}, {3, 2, 1})).matrix(0, 1) == doctest::Approx(-1.0));
  CHECK(spearman_matrix(two_columns({1, 2, 3}, {3, 1, 2})).matrix(0, 1) == doctest::Approx(-0.5));
}

TEST_CASE("spearman equals the definitional rank-Pearson oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int t = 20 + trial % 40, n = 2 + trial % 7;
    const KpiMatrix m(random_kpi(rng, t, n, trial % 2 == 0));
    const auto c = spearman_matrix(m).matrix;
    for (int i = 0; i < n; ++i) {
      CHECK(c(i, i) == 1.0);
      for (int j = i + 1; j < n; ++j) {
        const double want = pearson_oracle(rank_oracle(m.values().col(i)), rank_oracle(m.values().col(j)));
        CHECK(std::abs(c(i, j) - want) <= 1e-12);
        CHECK(c(i, j) == c(j, i));
      }
    }
  }
}

TEST_CASE("spearman equals pearson on ranked columns") {
  std::mt19937_64 rng(8);
  const KpiMatrix m(random_kpi(rng, 60, 5, true));
  Matrix ranked(60, 5);
  for (int c = 0; c < 5; ++c) ranked.col(c) = rank_transform(m.values().col(c));
  const auto s = spearman_matrix(m).matrix.entries();
  const auto p = pearson_matrix(KpiMatrix(ranked)).matrix.entries();
  CHECK((s - p).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pearson properties") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix m(1000, 3);
  for (int r = 0; r < 1000; ++r) {
    m(r, 0) = 5.0 + z(rng);
    m(r, 1) = 5.0 + z(rng);
    m(r, 2) = 3.0 * m(r, 0) + 2.0;
  }
  const auto c = pearson_matrix(KpiMatrix(m)).matrix;
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(c(0, 1)) < 0.1);
  CHECK(std::abs(c(0, 1) - pearson_oracle(m.col(0), m.col(1))) < 1e-12);
}

TEST_CASE("monotone transforms leave SRCC unchanged but move PCC") {
  std::mt19937_64 rng(10);
  Matrix m = random_kpi(rng, 200, 4, false);
  const auto before = spearman_matrix(KpiMatrix(m)).matrix.entries();
  const auto pcc_before = pearson_matrix(KpiMatrix(m)).matrix.entries();
  Matrix t = m;
  t.col(0) = m.col(0).array().exp().matrix();
  t.col(1) = m.col(1).array().cube().matrix();
  t.col(2) = (4.0 * m.col(2).array() + 1.0).matrix();
  CHECK((spearman_matrix(KpiMatrix(t)).matrix.entries() - before).cwiseAbs().maxCoeff() <= 1e-12);

  Matrix affine = m;
  affine.col(0) = (2.0 * m.col(0).array() + 7.0).matrix();
  CHECK((pearson_matrix(KpiMatrix(affine)).matrix.entries() - pcc_before).cwiseAbs().maxCoeff() <= 1e-12);

  Matrix expd = m;
  expd.col(0) = (3.0 * m.col(0)).array().exp().matrix();
  CHECK(std::abs(pearson_matrix(KpiMatrix(expd)).matrix(0, 2) - pcc_before(0, 2)) > 1e-4);
}

TEST_CASE("constant columns get zero coefficients and a warning") {
  Matrix m(5, 3);
  m << 1, 2, 0, 2, 4, 0, 3, 1, 0, 4, 3, 0, 5, 5, 0;
  for (auto variant : {CorrelationVariant::srcc, CorrelationVariant::pcc, CorrelationVariant::max_pcc_srcc}) {
    const auto r = correlation_for(KpiMatrix(m), variant);
    CHECK(r.warnings.size() == 1);
    CHECK(r.matrix(0, 2) == 0.0);
    CHECK(r.matrix(2, 1) == 0.0);
    CHECK(r.matrix(2, 2) == 1.0);
  }
}

TEST_CASE("max_combine") {
  Matrix a = Matrix::Identity(2, 2), b = Matrix::Identity(2, 2);
  a(0, 1) = a(1, 0) = 0.15;
  b(0, 1) = b(1, 0) = 0.3;
  const CorrelationMatrix ca(a), cb(b);
  CHECK(max_combine(ca, cb)(0, 1) == 0.3);
  CHECK(max_combine(ca, ca).entries() == a);
  CHECK_THROWS_AS(max_combine(ca, CorrelationMatrix(Matrix::Identity(3, 3))), Error);

  std::mt19937_64 rng(11);
  const KpiMatrix m(random_kpi(rng, 100, 6, false));
  const auto s = spearman_matrix(m).matrix, p = pearson_matrix(m).matrix;
  const auto mx = max_combine(s, p).entries();
  CHECK((mx.array() >= s.entries().array()).all());
  CHECK((mx.array() >= p.entries().array()).all());
  CHECK(mx == mx.transpose());
  CHECK(mx.diagonal() == Vector::Ones(6));
  CHECK(correlation_for(m, CorrelationVariant::max_pcc_srcc).matrix.entries() == mx);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("fa") == CorrelationVariant::srcc);
  CHECK(parse_variant("FA-MAX") == CorrelationVariant::max_pcc_srcc);
  CHECK(parse_variant("MAX_PCC_SRCC") == CorrelationVariant::max_pcc_srcc);
  CHECK(parse_variant("pcc") == CorrelationVariant::pcc);
  CHECK(to_string(CorrelationVariant::max_pcc_srcc) == "MAX_PCC_SRCC");
  CHECK_THROWS_AS(parse_variant("kendall"), Error);
}
