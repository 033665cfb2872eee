#include "nsinterf/factor_analysis.hpp"

#include "nsinterf/correlation.hpp"
#include "nsinterf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <set>

namespace nsinterf {

namespace {

struct Standardized {
  Matrix sample_cov;  // correlation matrix of the columns (1/T normalization)
  Vector mean;
  Vector scale;
  bool ridged = false;
};

Standardized standardize(const Matrix& data) {
  Standardized s;
  const double t = static_cast<double>(data.rows());
  s.mean = data.colwise().mean().transpose();
  Matrix z = data.rowwise() - s.mean.transpose();
  s.scale = (z.colwise().squaredNorm() / t).cwiseSqrt().transpose();
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    if (!(s.scale[c] > 0.0) || !std::isfinite(s.scale[c])) {
      throw Error(ErrorKind::degenerate, "column " + std::to_string(c) + " is constant");
    }
    z.col(c) /= s.scale[c];
  }
  s.sample_cov = (z.transpose() * z) / t;
  s.sample_cov = 0.5 * (s.sample_cov + s.sample_cov.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.sample_cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 1e-10) {
    s.sample_cov.diagonal().array() += 1e-8;
    s.ridged = true;
  }
  return s;
}

// Gaussian log-likelihood of T observations with sample covariance S under
// model covariance sigma.
double gaussian_loglik(const Matrix& sigma, const Matrix& s, double t) {
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const auto p = static_cast<double>(sigma.rows());
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double trace = llt.solve(s).trace();
  return -0.5 * t * (p * std::log(2.0 * std::numbers::pi) + logdet + trace);
}

// Principal-axis start: communalities from squared multiple correlations,
// loadings from the top-q eigenpairs of the reduced correlation matrix.
void principal_axis_start(const Matrix& s, int q, double floor, Matrix& lambda, Vector& psi) {
  const auto p = s.rows();
  const Matrix inv = s.ldlt().solve(Matrix::Identity(p, p));
  psi.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double d = inv(i, i);
    psi[i] = std::clamp(d > 0.0 ? 1.0 / d : 1.0, floor, s(i, i));
  }
  Matrix reduced = s;
  reduced.diagonal() -= psi;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  lambda.resize(p, q);
  for (int r = 0; r < q; ++r) {
    const Eigen::Index idx = p - 1 - r;  // eigenvalues ascend
    const double value = std::max(eig.eigenvalues()[idx], 1e-2);
    Vector v = eig.eigenvectors().col(idx);
    // Deterministic sign: largest-magnitude component positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    lambda.col(r) = std::sqrt(value) * v;
  }
}

}  // namespace

Matrix FactorModel::model_covariance() const {
  Matrix sigma = loadings.transpose() * loadings;
  sigma.diagonal() += uniquenesses;
  return sigma;
}

int FactorModel::parameter_count() const {
  const auto p = static_cast<int>(uniquenesses.size());
  return p * q + p - q * (q - 1) / 2;
}

int ledermann_bound(int p) {
  if (p < 1) return 0;
  // Largest integer q with (p - q)^2 >= p + q, i.e. nonnegative degrees of freedom.
  int q = 0;
  while ((p - (q + 1)) * (p - (q + 1)) >= p + (q + 1) && q + 1 < p) ++q;
  return q;
}

FactorModel fit_fa(const Matrix& data, int q, const FaOptions& opts) {
  const auto p = static_cast<int>(data.cols());
  if (p < 2) throw Error(ErrorKind::invalid_argument, "factor analysis needs at least 2 variables");
  const int q_max = std::max(1, ledermann_bound(p));
  if (q < 1 || q > q_max) {
    throw Error(ErrorKind::invalid_argument, "factor count " + std::to_string(q) +
                                                 " outside [1, " + std::to_string(q_max) + "]");
  }
  if (data.rows() <= p) {
    throw Error(ErrorKind::invalid_argument, "factor analysis needs more periods than variables");
  }
  const Standardized st = standardize(data);
  const Matrix& s = st.sample_cov;
  const double t = static_cast<double>(data.rows());

  FactorModel model;
  model.q = q;
  model.mean = st.mean;
  model.scale = st.scale;
  if (st.ridged) model.warnings.push_back("singular sample covariance; added a 1e-8 diagonal ridge");

  Matrix lambda;  // p x q
  Vector psi;
  principal_axis_start(s, q, opts.uniqueness_floor, lambda, psi);

  auto covariance = [&](const Matrix& l, const Vector& u) {
    Matrix sigma = l * l.transpose();
    sigma.diagonal() += u;
    return sigma;
  };

  double ll = gaussian_loglik(covariance(lambda, psi), s, t);
  model.trace.push_back(ll);
  const Matrix eye_q = Matrix::Identity(q, q);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const Matrix sigma = covariance(lambda, psi);
    const Eigen::LLT<Matrix> llt(sigma);
    // E-step: posterior factor moments, B = L^T Sigma^-1.
    const Matrix beta = llt.solve(lambda).transpose();  // q x p
    const Matrix beta_s = beta * s;                      // q x p
    const Matrix ezz = eye_q - beta * lambda + beta_s * beta.transpose();
    // M-step.
    const Matrix lambda_next = ezz.ldlt().solve(beta_s).transpose();  // p x q
    Vector psi_next = (s - lambda_next * beta_s).diagonal();
    psi_next = psi_next.cwiseMax(opts.uniqueness_floor);

    const double ll_next = gaussian_loglik(covariance(lambda_next, psi_next), s, t);
    lambda = lambda_next;
    psi = psi_next;
    model.trace.push_back(ll_next);
    model.iterations = iter + 1;
    const double gain = ll_next - ll;
    ll = ll_next;
    if (gain < opts.tol) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged) {
    model.warnings.push_back("EM stopped at max_iter=" + std::to_string(opts.max_iter) +
                             " before the log-likelihood gain fell below tol");
  }
  model.loadings = lambda.transpose();
  model.uniquenesses = psi;
  model.log_likelihood = ll;
  return model;
}

FactorModel select_q(const Matrix& data, const FaOptions& opts) {
  const auto p = static_cast<int>(data.cols());
  if (p < 2) throw Error(ErrorKind::invalid_argument, "factor analysis needs at least 2 variables");
  const int q_max = std::max(1, ledermann_bound(p));
  const double t = static_cast<double>(data.rows());
  FactorModel best;
  double best_score = 0.0;
  for (int q = 1; q <= q_max; ++q) {
    FactorModel fit = fit_fa(data, q, opts);
    double score = fit.log_likelihood;
    if (opts.selection == FactorSelection::bic) {
      score = fit.log_likelihood - 0.5 * fit.parameter_count() * std::log(t);
    }
    if (q == 1) {
      best = std::move(fit);
      best_score = score;
      continue;
    }
    // A larger q must beat the incumbent by more than the tie tolerance.
    if (score > best_score + opts.tie_tolerance * std::abs(best_score)) {
      best = std::move(fit);
      best_score = score;
    }
  }
  return best;
}

Matrix varimax(const Matrix& loadings, int max_iter, double eps) {
  const auto q = loadings.rows();
  const auto p = loadings.cols();
  if (q < 2) return loadings;
  Matrix x = loadings.transpose();  // p x q
  Vector norms = x.rowwise().norm();
  for (Eigen::Index i = 0; i < p; ++i) {
    if (norms[i] > 0.0) x.row(i) /= norms[i];
  }
  Matrix rot = Matrix::Identity(q, q);
  double d = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Matrix z = x * rot;
    const Vector col_ss = z.array().square().colwise().sum().transpose();
    const Matrix target = z.array().cube().matrix() - z * (col_ss / static_cast<double>(p)).asDiagonal();
    const Matrix b = x.transpose() * target;
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rot = svd.matrixU() * svd.matrixV().transpose();
    const double d_prev = d;
    d = svd.singularValues().sum();
    if (d < d_prev * (1.0 + eps)) break;
  }
  Matrix z = x * rot;
  for (Eigen::Index i = 0; i < p; ++i) z.row(i) *= norms[i];
  return z.transpose();
}

std::vector<IndexSet> loadings_to_subsets(const FactorModel& model, const IndexSet& clique,
                                          double theta) {
  if (static_cast<Eigen::Index>(clique.size()) != model.loadings.cols()) {
    throw Error(ErrorKind::invalid_argument, "clique size does not match the fitted model");
  }
  const Matrix rotated = varimax(model.loadings);
  std::set<IndexSet> unique;
  for (Eigen::Index r = 0; r < rotated.rows(); ++r) {
    const double top = rotated.row(r).cwiseAbs().maxCoeff();
    if (!(top > 0.0)) continue;
    IndexSet members;
    for (Eigen::Index i = 0; i < rotated.cols(); ++i) {
      if (std::abs(rotated(r, i)) >= theta * top) members.push_back(clique[static_cast<std::size_t>(i)]);
    }
    if (members.size() >= 2) {
      std::sort(members.begin(), members.end());
      unique.insert(std::move(members));
    }
  }
  return {unique.begin(), unique.end()};
}

namespace {

bool contains(const IndexSet& outer, const IndexSet& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

// Spearman correlation among `cols`, restricted to `rows` (all rows if empty).
Matrix rank_corr(const Matrix& x, const IndexSet& cols, const std::vector<int>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.empty() ? x.rows() : rows.size());
  const auto p = static_cast<Eigen::Index>(cols.size());
  Matrix z(n, p);
  Vector col(n);
  for (Eigen::Index c = 0; c < p; ++c) {
    for (Eigen::Index t = 0; t < n; ++t) {
      col[t] = x(rows.empty() ? t : rows[static_cast<std::size_t>(t)], cols[static_cast<std::size_t>(c)]);
    }
    Vector r = rank_transform(col);
    r.array() -= r.mean();
    const double norm = r.norm();
    z.col(c) = norm > 0.0 ? Vector(r / norm) : Vector::Zero(n);
  }
  return z.transpose() * z;
}

std::vector<int> quiet_periods(const Matrix& x, int slice, double quantile) {
  std::vector<double> sorted(x.col(slice).data(), x.col(slice).data() + x.rows());
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[static_cast<std::size_t>(quantile * static_cast<double>(sorted.size() - 1))];
  std::vector<int> rows;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    if (x(t, slice) <= cut) rows.push_back(static_cast<int>(t));
  }
  return rows;
}

// Re-examines a single-factor clique; see stage3.
std::vector<IndexSet> split_on_quiet(const Matrix& x, const IndexSet& clique, const CliqueList& all,
                                     const CliqueRefinement& opts) {
  auto elsewhere = [&](const IndexSet& s) {
    for (const auto& other : all) {
      if (other != clique && contains(other, s)) return true;
    }
    return false;
  };
  const std::size_t p = clique.size();
  std::vector<std::vector<bool>> explained(p, std::vector<bool>(p, false));
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) explained[a][b] = elsewhere({clique[a], clique[b]});
  }
  auto local = [&](int slice) {
    return static_cast<std::size_t>(std::lower_bound(clique.begin(), clique.end(), slice) - clique.begin());
  };

  std::set<IndexSet> found;
  for (int k : clique) {
    const std::vector<int> rows = quiet_periods(x, k, opts.quiet_quantile);
    if (static_cast<int>(rows.size()) < opts.min_quiet_periods) continue;
    IndexSet rest;
    for (int v : clique) {
      if (v != k) rest.push_back(v);
    }
    const Matrix c = rank_corr(x, rest, rows);
    const double cut = opts.z_link / std::sqrt(static_cast<double>(rows.size()) - 1.0);
    InterferenceGraph linked(static_cast<int>(rest.size()));
    for (std::size_t a = 0; a < rest.size(); ++a) {
      for (std::size_t b = a + 1; b < rest.size(); ++b) {
        if (c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) >= cut) {
          linked.add_edge(static_cast<int>(a), static_cast<int>(b));
        }
      }
    }
    if (linked.edge_count() == 0) continue;
    for (const auto& group : maximal_cliques(linked)) {
      IndexSet members;
      for (int g : group) members.push_back(rest[static_cast<std::size_t>(g)]);
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) explained[local(members[a])][local(members[b])] = true;
      }
      if (!elsewhere(members)) found.insert(std::move(members));
    }
  }

  bool whole = false;
  for (std::size_t a = 0; a < p && !whole; ++a) {
    for (std::size_t b = a + 1; b < p; ++b) {
      if (!explained[a][b]) {
        whole = true;
        break;
      }
    }
  }
  if (whole) found.insert(clique);
  return {found.begin(), found.end()};
}

}  // namespace

Stage3Result stage3(const KpiMatrix& m, const CliqueList& cliques, const FaOptions& opts) {
  Stage3Result result;
  const Matrix& x = m.values();
  const CliqueRefinement& refine = opts.refine;

  CliqueList work = cliques;
  if (refine.enabled) {
    const double cut = refine.z_pair / std::sqrt(static_cast<double>(m.periods()) - 1.0);
    std::erase_if(work, [&](const IndexSet& c) { return c.size() == 2 && rank_corr(x, c, {})(0, 1) < cut; });
  }

  std::set<IndexSet> all;
  for (const auto& clique : work) {
    CliqueFit fit;
    fit.clique = clique;
    try {
      const FactorModel model = select_q(m.columns(clique), opts);
      fit.q = model.q;
      fit.log_likelihood = model.log_likelihood;
      fit.converged = model.converged;
      if (model.q > 1) {
        fit.subsets = loadings_to_subsets(model, clique, opts.theta);
      } else if (refine.enabled && clique.size() >= 3) {
        fit.subsets = split_on_quiet(x, clique, work, refine);
      } else {
        fit.subsets = {clique};
      }
    } catch (const Error& e) {
      std::string where = "clique {";
      for (std::size_t k = 0; k < clique.size(); ++k) where += (k ? "," : "") + std::to_string(clique[k]);
      result.warnings.push_back(where + "} skipped: " + e.what());
      continue;
    }
    all.insert(fit.subsets.begin(), fit.subsets.end());
    result.fits.push_back(std::move(fit));
  }
  result.subsets.assign(all.begin(), all.end());
  return result;
}

}  // namespace nsinterf
