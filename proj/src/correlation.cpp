#include "nsinterf/correlation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace nsinterf {

namespace {

// Pearson correlation of every column pair of `x`. Constant columns get
// zero coefficients and a warning.
CorrelationResult column_pearson(const Matrix& x) {
  const Eigen::Index n = x.cols();
  CorrelationResult result;
  Matrix z = x.rowwise() - x.colwise().mean();
  std::vector<bool> constant(static_cast<std::size_t>(n), false);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double norm = z.col(c).norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
      constant[static_cast<std::size_t>(c)] = true;
      z.col(c).setZero();
      result.warnings.push_back("slice " + std::to_string(c) +
                                " has a constant series; its coefficients are set to 0");
    } else {
      z.col(c) /= norm;
    }
  }
  Matrix c = z.transpose() * z;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(c(i, j), -1.0, 1.0);
      c(i, j) = v;
      c(j, i) = v;
    }
    c(i, i) = 1.0;
  }
  result.matrix = CorrelationMatrix(std::move(c));
  return result;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace

std::string to_string(CorrelationVariant v) {
  switch (v) {
    case CorrelationVariant::srcc:
      return "SRCC";
    case CorrelationVariant::max_pcc_srcc:
      return "MAX_PCC_SRCC";
    case CorrelationVariant::pcc:
      return "PCC";
  }
  return "SRCC";
}

CorrelationVariant parse_variant(const std::string& text) {
  const std::string t = lower(text);
  if (t == "fa" || t == "srcc") return CorrelationVariant::srcc;
  if (t == "fa-max" || t == "max_pcc_srcc") return CorrelationVariant::max_pcc_srcc;
  if (t == "pcc") return CorrelationVariant::pcc;
  throw Error(ErrorKind::invalid_argument, "unknown correlation variant '" + text + "'");
}

Vector rank_transform(const Vector& x) {
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return x[a] < x[b]; });
  Vector ranks(x.size());
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && x[order[end]] == x[order[start]]) ++end;
    // positions start..end-1 (0-based) share rank mean((start+1)..end)
    const double shared = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = shared;
    start = end;
  }
  return ranks;
}

CorrelationResult pearson_matrix(const KpiMatrix& m) { return column_pearson(m.values()); }

CorrelationResult spearman_matrix(const KpiMatrix& m) {
  const Matrix& v = m.values();
  Matrix ranks(v.rows(), v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) ranks.col(c) = rank_transform(v.col(c));
  return column_pearson(ranks);
}

CorrelationMatrix max_combine(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument, "cannot combine correlation matrices of different sizes");
  }
  return CorrelationMatrix(a.entries().cwiseMax(b.entries()));
}

CorrelationResult correlation_for(const KpiMatrix& m, CorrelationVariant variant) {
  switch (variant) {
    case CorrelationVariant::srcc:
      return spearman_matrix(m);
    case CorrelationVariant::pcc:
      return pearson_matrix(m);
    case CorrelationVariant::max_pcc_srcc: {
      CorrelationResult s = spearman_matrix(m);
      CorrelationResult p = pearson_matrix(m);
      CorrelationResult out;
      out.matrix = max_combine(p.matrix, s.matrix);
      out.warnings = std::move(s.warnings);
      return out;
    }
  }
  return spearman_matrix(m);
}

}  // namespace nsinterf
