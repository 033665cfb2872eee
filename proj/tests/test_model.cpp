#include "fixtures.hpp"
#include "nsinterf/model.hpp"

#include <doctest.h>

#include <random>

using namespace nsinterf;

TEST_CASE("validate_assignment on small matrices") {
  CHECK(validate_assignment(AssignmentMatrix::from_rows({{1, 1, 1}, {1, 1, 0}})).ok());
  CHECK(validate_assignment(AssignmentMatrix::from_rows({{1, 1, 0}, {0, 1, 1}})).ok());

  auto dup = validate_assignment(AssignmentMatrix::from_rows({{1, 1, 0}, {1, 1, 0}}));
  REQUIRE_FALSE(dup.ok());
  bool saw_duplicate = false;
  for (const auto& v : dup.violations) {
    if (v.kind == AssignmentViolation::Kind::duplicate_rows) {
      saw_duplicate = true;
      CHECK(v.index == 0);
      CHECK(v.other == 1);
    }
  }
  CHECK(saw_duplicate);

  auto sparse = validate_assignment(AssignmentMatrix::from_rows({{1, 0, 0}, {0, 0, 1}}));
  int sparse_rows = 0, empty_cols = 0;
  for (const auto& v : sparse.violations) {
    if (v.kind == AssignmentViolation::Kind::sparse_row) ++sparse_rows;
    if (v.kind == AssignmentViolation::Kind::empty_column) {
      ++empty_cols;
      CHECK(v.index == 1);
    }
  }
  CHECK(sparse_rows == 2);
  CHECK(empty_cols == 1);
  for (const auto& v : sparse.violations) CHECK_FALSE(v.describe().empty());
}

TEST_CASE("membership lookups on the two-resource example") {
  const auto a = AssignmentMatrix::from_rows(testing::nested_rows());
  CHECK(slices_of_resource(a, 0) == IndexSet{0, 1, 2});
  CHECK(slices_of_resource(a, 1) == IndexSet{0, 1});
  CHECK(resources_of_slice(a, 2) == IndexSet{0});
  CHECK(resources_of_slice(a, 0) == IndexSet{0, 1});
  CHECK_THROWS_AS(slices_of_resource(a, 2), Error);
  CHECK_THROWS_AS(resources_of_slice(a, -1), Error);

  const auto ones = AssignmentMatrix::from_rows({{1, 1, 1, 1}});
  CHECK(slices_of_resource(ones, 0) == IndexSet{0, 1, 2, 3});
  const auto single = AssignmentMatrix::from_rows({{1, 0, 1}});
  CHECK(resources_of_slice(single, 1).empty());
}

TEST_CASE("membership lookups agree in both directions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = gen_assignment(12, 4, rng, 0.3);
    REQUIRE(validate_assignment(a).ok());
    for (int j = 0; j < a.resources(); ++j) {
      const auto sl = slices_of_resource(a, j);
      CHECK(sl.size() >= 2);
      for (int i = 0; i < a.slices(); ++i) {
        const auto rs = resources_of_slice(a, i);
        const bool in_sl = std::binary_search(sl.begin(), sl.end(), i);
        const bool in_rs = std::binary_search(rs.begin(), rs.end(), j);
        CHECK(in_sl == in_rs);
      }
    }
    for (int i = 0; i < a.slices(); ++i) CHECK_FALSE(resources_of_slice(a, i).empty());
  }
}

TEST_CASE("value types reject malformed input") {
  CHECK_THROWS_AS(KpiMatrix(Matrix::Zero(1, 3)), Error);
  Matrix neg = Matrix::Ones(4, 2);
  neg(2, 1) = -1.0;
  CHECK_THROWS_AS(KpiMatrix{neg}, Error);
  CHECK_THROWS_AS(CorrelationMatrix(Matrix::Identity(3, 2)), Error);

  InterferenceGraph g(4);
  g.add_edge(0, 2);
  g.add_edge(2, 3);
  CHECK(g.has_edge(2, 0));
  CHECK(g.degree(2) == 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.neighbors(2) == IndexSet{0, 3});
  CHECK_THROWS_AS(g.add_edge(1, 1), Error);
}

TEST_CASE("from_subsets builds one row per subset") {
  const auto a = AssignmentMatrix::from_subsets({{0, 2}, {1, 2, 3}}, 4);
  CHECK(a.resources() == 2);
  CHECK(a.row_support(0) == IndexSet{0, 2});
  CHECK(a.row_support(1) == IndexSet{1, 2, 3});
  CHECK_THROWS_AS(AssignmentMatrix::from_subsets({{0, 4}}, 4), Error);
}
