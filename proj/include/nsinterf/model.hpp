// Core domain types shared by every stage of the interference detector.
//
// Indices are 0-based throughout: slice i is column i of a KPI matrix and
// of an assignment matrix, resource j is row j of an assignment matrix.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsinterf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BinaryMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sorted, duplicate-free list of slice (or resource) indices.
using IndexSet = std::vector<int>;

enum class ErrorKind {
  invalid_argument,
  out_of_range,
  infeasible,
  degenerate,
  parse,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// T x N matrix of per-period, per-slice end-to-end measurements.
/// Entries are finite and nonnegative; T >= 2 and N >= 2.
class KpiMatrix {
 public:
  explicit KpiMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  int periods() const noexcept { return static_cast<int>(values_.rows()); }
  int slices() const noexcept { return static_cast<int>(values_.cols()); }

  /// Columns listed in `slices`, in that order.
  Matrix columns(const IndexSet& slices) const;

 private:
  Matrix values_;
};

/// R x N binary resource-to-slice membership. The structural invariants
/// (column coverage, row weight >= 2, distinct rows) are checked by
/// validate_assignment rather than at construction, because estimates and
/// hand-built test fixtures may violate them.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  explicit AssignmentMatrix(BinaryMatrix entries);
  AssignmentMatrix(int resources, int slices);
  static AssignmentMatrix from_rows(const std::vector<std::vector<int>>& rows);
  /// One row per subset; every subset index must be < slices.
  static AssignmentMatrix from_subsets(const std::vector<IndexSet>& subsets, int slices);

  const BinaryMatrix& entries() const noexcept { return entries_; }
  int resources() const noexcept { return static_cast<int>(entries_.rows()); }
  int slices() const noexcept { return static_cast<int>(entries_.cols()); }
  bool at(int resource, int slice) const { return entries_(resource, slice) != 0; }
  IndexSet row_support(int resource) const;

  friend bool operator==(const AssignmentMatrix& a, const AssignmentMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_.cols() == b.entries_.cols() &&
           a.entries_ == b.entries_;
  }

 private:
  BinaryMatrix entries_;
};

/// N x N symmetric matrix of pairwise coefficients with unit diagonal.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  explicit CorrelationMatrix(Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  int size() const noexcept { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// Undirected interference graph as a symmetric 0/1 adjacency matrix with
/// zero diagonal.
class InterferenceGraph {
 public:
  InterferenceGraph() = default;
  explicit InterferenceGraph(int n);
  explicit InterferenceGraph(BinaryMatrix adjacency);

  const BinaryMatrix& adjacency() const noexcept { return adjacency_; }
  int size() const noexcept { return static_cast<int>(adjacency_.rows()); }
  bool has_edge(int i, int j) const { return adjacency_(i, j) != 0; }
  void add_edge(int i, int j);
  IndexSet neighbors(int i) const;
  int degree(int i) const;
  int edge_count() const;

 private:
  BinaryMatrix adjacency_;
};

/// Maximal cliques, each sorted ascending, the list sorted lexicographically.
using CliqueList = std::vector<IndexSet>;

struct AssignmentViolation {
  enum class Kind { empty_column, sparse_row, duplicate_rows };
  Kind kind;
  int index;      // column for empty_column, row otherwise
  int other = -1; // second row for duplicate_rows

  std::string describe() const;
};

struct AssignmentValidation {
  std::vector<AssignmentViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

AssignmentValidation validate_assignment(const AssignmentMatrix& a);

/// { i : A[j, i] = 1 }
IndexSet slices_of_resource(const AssignmentMatrix& a, int resource);

/// { j : A[j, i] = 1 }
IndexSet resources_of_slice(const AssignmentMatrix& a, int slice);

}  // namespace nsinterf
