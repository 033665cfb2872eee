// Pairwise similarity of slice measurement series.
#pragma once

#include "nsinterf/model.hpp"

#include <string>
#include <vector>

namespace nsinterf {

enum class CorrelationVariant {
  srcc,          // Spearman rank correlation ("FA")
  max_pcc_srcc,  // entrywise max of Pearson and Spearman ("FA-max")
  pcc,           // Pearson only
};

std::string to_string(CorrelationVariant v);
/// Accepts the canonical names (SRCC, MAX_PCC_SRCC, PCC) and the CLI
/// spellings (fa, fa-max, pcc), case-insensitively.
CorrelationVariant parse_variant(const std::string& text);

struct CorrelationResult {
  CorrelationMatrix matrix;
  /// One entry per constant column; those rows/columns are zero off the
  /// diagonal.
  std::vector<std::string> warnings;
};

/// Fractional ranks 1..T; tied values share the mean of their positions.
Vector rank_transform(const Vector& x);

CorrelationResult pearson_matrix(const KpiMatrix& m);
CorrelationResult spearman_matrix(const KpiMatrix& m);

/// Entrywise maximum. Throws Error(invalid_argument) on dimension mismatch.
CorrelationMatrix max_combine(const CorrelationMatrix& a, const CorrelationMatrix& b);

CorrelationResult correlation_for(const KpiMatrix& m, CorrelationVariant variant);

}  // namespace nsinterf
