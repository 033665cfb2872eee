#include "nsinterf/model.hpp"

#include <cmath>
#include <sstream>

namespace nsinterf {

KpiMatrix::KpiMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    std::ostringstream msg;
    msg << "KPI matrix needs at least 2 periods and 2 slices, got " << values_.rows() << "x"
        << values_.cols();
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
  for (Eigen::Index c = 0; c < values_.cols(); ++c) {
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
      const double v = values_(r, c);
      if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "KPI entry (" << r << ", " << c << ") = " << v << " is not a finite nonnegative value";
        throw Error(ErrorKind::invalid_argument, msg.str());
      }
    }
  }
}

Matrix KpiMatrix::columns(const IndexSet& slices) const {
  Matrix out(values_.rows(), static_cast<Eigen::Index>(slices.size()));
  for (std::size_t k = 0; k < slices.size(); ++k) {
    if (slices[k] < 0 || slices[k] >= this->slices()) {
      throw Error(ErrorKind::out_of_range, "slice index " + std::to_string(slices[k]) + " out of range");
    }
    out.col(static_cast<Eigen::Index>(k)) = values_.col(slices[k]);
  }
  return out;
}

AssignmentMatrix::AssignmentMatrix(BinaryMatrix entries) : entries_(std::move(entries)) {
  for (Eigen::Index r = 0; r < entries_.rows(); ++r) {
    for (Eigen::Index c = 0; c < entries_.cols(); ++c) {
      if (entries_(r, c) > 1) {
        throw Error(ErrorKind::invalid_argument, "assignment matrix entries must be 0 or 1");
      }
    }
  }
}

AssignmentMatrix::AssignmentMatrix(int resources, int slices)
    : entries_(BinaryMatrix::Zero(resources, slices)) {}

AssignmentMatrix AssignmentMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) return AssignmentMatrix(0, 0);
  const auto n = rows.front().size();
  BinaryMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n) throw Error(ErrorKind::invalid_argument, "ragged assignment rows");
    for (std::size_t c = 0; c < n; ++c) {
      const int v = rows[r][c];
      if (v != 0 && v != 1) throw Error(ErrorKind::invalid_argument, "assignment matrix entries must be 0 or 1");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<std::uint8_t>(v);
    }
  }
  return AssignmentMatrix(std::move(m));
}

AssignmentMatrix AssignmentMatrix::from_subsets(const std::vector<IndexSet>& subsets, int slices) {
  AssignmentMatrix a(static_cast<int>(subsets.size()), slices);
  for (std::size_t r = 0; r < subsets.size(); ++r) {
    for (int i : subsets[r]) {
      if (i < 0 || i >= slices) throw Error(ErrorKind::out_of_range, "subset member out of range");
      a.entries_(static_cast<Eigen::Index>(r), i) = 1;
    }
  }
  return a;
}

IndexSet AssignmentMatrix::row_support(int resource) const {
  IndexSet out;
  for (int i = 0; i < slices(); ++i) {
    if (entries_(resource, i)) out.push_back(i);
  }
  return out;
}

CorrelationMatrix::CorrelationMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::invalid_argument, "correlation matrix must be square");
  }
}

InterferenceGraph::InterferenceGraph(int n) : adjacency_(BinaryMatrix::Zero(n, n)) {}

InterferenceGraph::InterferenceGraph(BinaryMatrix adjacency) : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols()) {
    throw Error(ErrorKind::invalid_argument, "adjacency matrix must be square");
  }
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
    if (adjacency_(i, i) != 0) throw Error(ErrorKind::invalid_argument, "adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (adjacency_(i, j) > 1 || adjacency_(i, j) != adjacency_(j, i)) {
        throw Error(ErrorKind::invalid_argument, "adjacency matrix must be symmetric 0/1");
      }
    }
  }
}

void InterferenceGraph::add_edge(int i, int j) {
  if (i == j) throw Error(ErrorKind::invalid_argument, "self loops are not allowed");
  adjacency_(i, j) = 1;
  adjacency_(j, i) = 1;
}

IndexSet InterferenceGraph::neighbors(int i) const {
  IndexSet out;
  for (int j = 0; j < size(); ++j) {
    if (adjacency_(i, j)) out.push_back(j);
  }
  return out;
}

int InterferenceGraph::degree(int i) const {
  int d = 0;
  for (int j = 0; j < size(); ++j) d += adjacency_(i, j);
  return d;
}

int InterferenceGraph::edge_count() const {
  int total = 0;
  for (int i = 0; i < size(); ++i) total += degree(i);
  return total / 2;
}

std::string AssignmentViolation::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::empty_column:
      out << "slice " << index << " uses no resource";
      break;
    case Kind::sparse_row:
      out << "resource " << index << " is shared by fewer than two slices";
      break;
    case Kind::duplicate_rows:
      out << "resources " << index << " and " << other << " have identical sharing sets";
      break;
  }
  return out.str();
}

AssignmentValidation validate_assignment(const AssignmentMatrix& a) {
  AssignmentValidation result;
  const auto& e = a.entries();
  for (int i = 0; i < a.slices(); ++i) {
    if (e.col(i).cast<int>().sum() < 1) {
      result.violations.push_back({AssignmentViolation::Kind::empty_column, i});
    }
  }
  for (int j = 0; j < a.resources(); ++j) {
    if (e.row(j).cast<int>().sum() < 2) {
      result.violations.push_back({AssignmentViolation::Kind::sparse_row, j});
    }
  }
  for (int j = 0; j < a.resources(); ++j) {
    for (int k = j + 1; k < a.resources(); ++k) {
      if (e.row(j) == e.row(k)) {
        result.violations.push_back({AssignmentViolation::Kind::duplicate_rows, j, k});
      }
    }
  }
  return result;
}

IndexSet slices_of_resource(const AssignmentMatrix& a, int resource) {
  if (resource < 0 || resource >= a.resources()) {
    throw Error(ErrorKind::out_of_range, "resource index " + std::to_string(resource) + " out of range");
  }
  return a.row_support(resource);
}

IndexSet resources_of_slice(const AssignmentMatrix& a, int slice) {
  if (slice < 0 || slice >= a.slices()) {
    throw Error(ErrorKind::out_of_range, "slice index " + std::to_string(slice) + " out of range");
  }
  IndexSet out;
  for (int j = 0; j < a.resources(); ++j) {
    if (a.at(j, slice)) out.push_back(j);
  }
  return out;
}

}  // namespace nsinterf
