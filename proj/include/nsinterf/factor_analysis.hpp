// Maximum-likelihood factor analysis fitted by EM, applied per maximal
// clique to split it into candidate shared-resource subsets.
//
// Model, for the standardized clique columns x (length p):
//
//   x = L^T f + e,   f ~ N(0, I_q),   e ~ N(0, diag(psi))
//   cov(x) = L^T L + diag(psi)
//
// L is the q x p loading matrix (one row per latent shared resource).
#pragma once

#include "nsinterf/model.hpp"

#include <string>
#include <vector>

namespace nsinterf {

enum class FactorSelection {
  max_likelihood,  // largest log-likelihood, smaller q on ties
  bic,             // smallest Bayesian information criterion
};

/// Data-driven corrections applied around the per-clique fits in stage3.
struct CliqueRefinement {
  bool enabled = true;
  /// A 2-clique is kept only if its rank correlation is at least
  /// z_pair / sqrt(T - 1).
  double z_pair = 4.0;
  /// Single-factor cliques are re-examined on the periods where one member is
  /// quiet (at or below this quantile of its own KPI).
  double quiet_quantile = 0.25;
  double z_link = 3.0;
  int min_quiet_periods = 20;
};

struct FaOptions {
  int max_iter = 500;
  double tol = 1e-6;
  double uniqueness_floor = 1e-6;
  FactorSelection selection = FactorSelection::bic;
  /// Relative tolerance when comparing log-likelihoods across q.
  double tie_tolerance = 1e-6;
  /// Subset membership threshold, relative to a factor's largest |loading|.
  double theta = 0.5;
  CliqueRefinement refine;
};

struct FactorModel {
  Matrix loadings;      // q x p, standardized scale
  Vector uniquenesses;  // p, >= uniqueness floor
  Vector mean;          // p, column means of the raw data
  Vector scale;         // p, column standard deviations of the raw data
  int q = 0;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Log-likelihood after initialization and after every EM step.
  std::vector<double> trace;
  std::vector<std::string> warnings;

  /// loadings^T loadings + diag(uniquenesses)
  Matrix model_covariance() const;
  /// Free parameters, for information criteria.
  int parameter_count() const;
};

/// Largest q with nonnegative degrees of freedom for p observed variables:
/// floor((2p + 1 - sqrt(8p + 1)) / 2).
int ledermann_bound(int p);

/// EM fit with q factors on a T x p data matrix (columns standardized
/// internally). Throws Error(invalid_argument) when q is outside
/// [1, max(1, ledermann_bound(p))] or T <= p, Error(degenerate) when a column
/// is constant.
FactorModel fit_fa(const Matrix& data, int q, const FaOptions& opts = {});

/// Fits every admissible q and keeps the best according to opts.selection.
FactorModel select_q(const Matrix& data, const FaOptions& opts = {});

/// Orthogonal varimax rotation (Kaiser-normalized) of a q x p loading matrix.
Matrix varimax(const Matrix& loadings, int max_iter = 1000, double eps = 1e-8);

/// Subsets of the clique, one per rotated factor: slices whose |loading| is at
/// least theta times the factor's largest |loading|. Subsets of size < 2 are
/// dropped; indices are mapped to the clique's global slice ids.
std::vector<IndexSet> loadings_to_subsets(const FactorModel& model, const IndexSet& clique,
                                          double theta = 0.5);

struct CliqueFit {
  IndexSet clique;
  int q = 0;
  double log_likelihood = 0.0;
  bool converged = false;
  std::vector<IndexSet> subsets;
};

struct Stage3Result {
  /// Deduplicated union over cliques, sorted lexicographically.
  std::vector<IndexSet> subsets;
  std::vector<CliqueFit> fits;
  std::vector<std::string> warnings;
};

/// Per clique: extract its columns and select_q. A clique explained by a single
/// factor is a subset as a whole; otherwise loadings_to_subsets splits it. The
/// result is the union. A clique whose fit fails is skipped with a warning.
///
/// With opts.refine enabled, weak 2-cliques are dropped first (see
/// CliqueRefinement), and each single-factor clique of size >= 3 is checked
/// for nested or pairwise sharing: for every member k, the remaining members
/// are linked when their rank correlation over k's quiet periods is
/// significant. Maximal groups of linked slices that are not inside another
/// clique become extra subsets, and the clique itself is dropped when every
/// pair in it is accounted for by such a group or by another clique.
Stage3Result stage3(const KpiMatrix& m, const CliqueList& cliques, const FaOptions& opts = {});

}  // namespace nsinterf
