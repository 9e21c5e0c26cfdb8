#include "rcvvar/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rcvvar {

namespace {

std::string model_to_string(const std::vector<int>& m) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m[i];
  out << "}";
  return out.str();
}

}  // namespace

IndexSet::IndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0) throw ConfigError("IndexSet: negative index");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw ConfigError("IndexSet: indices must be strictly increasing");
  }
}

IndexSet IndexSet::from_unsorted(std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    throw ConfigError("IndexSet: duplicate index");
  return IndexSet(std::move(indices));
}

bool IndexSet::contains(int j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

bool IndexSet::contains_all(const IndexSet& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(),
                       other.indices_.end());
}

IndexSet IndexSet::unite(const IndexSet& other) const {
  std::vector<int> out;
  out.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                 std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet IndexSet::intersect(const IndexSet& other) const {
  std::vector<int> out;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(),
                        other.indices_.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

IndexSet IndexSet::difference(const IndexSet& other) const {
  std::vector<int> out;
  std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(),
                      other.indices_.end(), std::back_inserter(out));
  return IndexSet(std::move(out));
}

void CovarianceSpec::validate(int p) const {
  if (kind == Kind::identity) return;
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("covariance: rho must lie in (-1, 1)");
  if (kind == Kind::equicorrelated && p > 1 && !(rho > -1.0 / (p - 1)))
    throw ConfigError("covariance: equicorrelated rho must exceed -1/(p-1)");
}

double CovarianceSpec::correlation(int i, int j) const {
  if (i == j) return 1.0;
  switch (kind) {
    case Kind::identity:
      return 0.0;
    case Kind::equicorrelated:
      return rho;
    case Kind::ar1:
      return std::pow(rho, std::abs(i - j));
  }
  return 0.0;
}

std::string CovarianceSpec::name() const {
  switch (kind) {
    case Kind::identity:
      return "identity";
    case Kind::equicorrelated:
      return "equicorrelated";
    case Kind::ar1:
      return "ar1";
  }
  return "identity";
}

Dataset::Dataset(Eigen::MatrixXd X_in, Eigen::VectorXd y_in, std::vector<std::string> labels_in,
                 IndexSet keep_in)
    : X(std::move(X_in)), y(std::move(y_in)), labels(std::move(labels_in)),
      keep(std::move(keep_in)) {
  if (X.rows() != y.size()) throw ConfigError("Dataset: row count of X must equal length of y");
  if (X.rows() < 2) throw ConfigError("Dataset: need at least two observations");
  if (!labels.empty() && static_cast<int>(labels.size()) != p())
    throw ConfigError("Dataset: label count must equal p");
  if (!keep.empty() && keep[keep.size() - 1] >= p())
    throw ConfigError("Dataset: keep-list index out of range");
}

std::string Dataset::label(int j) const {
  if (!labels.empty()) return labels[static_cast<std::size_t>(j)];
  return "x" + std::to_string(j + 1);
}

Dataset Dataset::rows(const std::vector<int>& row_indices) const {
  const int m = static_cast<int>(row_indices.size());
  Eigen::MatrixXd Xs(m, X.cols());
  Eigen::VectorXd ys(m);
  for (int i = 0; i < m; ++i) {
    Xs.row(i) = X.row(row_indices[static_cast<std::size_t>(i)]);
    ys(i) = y(row_indices[static_cast<std::size_t>(i)]);
  }
  return Dataset(std::move(Xs), std::move(ys), labels, keep);
}

Eigen::MatrixXd generate_design(int n, int p, const CovarianceSpec& cov, const Rng& rng) {
  if (n < 1 || p < 1) throw ConfigError("generate_design: n and p must be positive");
  cov.validate(p);
  Rng r = rng.child(0);
  Eigen::MatrixXd X(n, p);
  switch (cov.kind) {
    case CovarianceSpec::Kind::identity: {
      for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = r.normal();
      break;
    }
    case CovarianceSpec::Kind::equicorrelated: {
      if (cov.rho >= 0.0) {
        const double a = std::sqrt(cov.rho);
        const double c = std::sqrt(1.0 - cov.rho);
        Eigen::VectorXd z0(n);
        for (int i = 0; i < n; ++i) z0(i) = r.normal();
        for (int j = 0; j < p; ++j) {
          for (int i = 0; i < n; ++i) X(i, j) = r.normal();
          X.col(j) = a * z0 + c * X.col(j);
        }
      } else {
        // Symmetric square root (1-rho) I + rho 11^T = (aI + b 11^T)^2.
        const double a = std::sqrt(1.0 - cov.rho);
        const double b = (std::sqrt(1.0 + (p - 1) * cov.rho) - a) / p;
        Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < p; ++j) {
          for (int i = 0; i < n; ++i) X(i, j) = r.normal();
          rowsum += X.col(j);
        }
        X *= a;
        for (int j = 0; j < p; ++j) X.col(j) += b * rowsum;
      }
      break;
    }
    case CovarianceSpec::Kind::ar1: {
      const double c = std::sqrt(1.0 - cov.rho * cov.rho);
      for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) X(i, j) = r.normal();
        if (j > 0) X.col(j) = cov.rho * X.col(j - 1) + c * X.col(j);
      }
      break;
    }
  }
  return X;
}

Eigen::VectorXd simulate_response(const Eigen::MatrixXd& X, const std::map<int, double>& beta,
                                  double sigma, const Rng& rng, Eigen::VectorXd* eps_out) {
  if (!(sigma > 0.0)) throw ConfigError("simulate_response: sigma must be positive");
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const auto& [j, coef] : beta) {
    if (j < 0 || j >= X.cols()) throw ConfigError("simulate_response: beta index out of range");
    mean += coef * X.col(j);
  }
  Rng r = rng.child(0);
  Eigen::VectorXd eps(n);
  for (int i = 0; i < n; ++i) eps(i) = r.normal();
  if (eps_out) *eps_out = eps;
  return mean + sigma * eps;
}

OlsFit ols_fit(const Dataset& data, const IndexSet& model, const OlsOptions& options) {
  const int n = data.n();
  const int m = model.size();
  OlsFit fit;
  fit.model = model;
  fit.df_resid = n - m;
  if (m == 0) {
    fit.coefficients = Eigen::VectorXd();
    fit.fitted = Eigen::VectorXd::Zero(n);
    fit.rss = data.y.squaredNorm();
    if (options.want_gram_inverse) fit.gram_inverse = Eigen::MatrixXd(0, 0);
    return fit;
  }
  if (m >= n) throw ConfigError("ols_fit: model size must stay below n");

  Eigen::MatrixXd Xm(n, m);
  for (int k = 0; k < m; ++k) Xm.col(k) = data.X.col(model[k]);

  if (options.ridge > 0.0) {
    Eigen::MatrixXd gram = Xm.transpose() * Xm;
    gram.diagonal().array() += options.ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
      throw SingularFitError("ols_fit: ridge solve failed on model " +
                                 model_to_string(model.indices()),
                             model.indices());
    fit.coefficients = ldlt.solve(Xm.transpose() * data.y);
    fit.ridge_fallback_used = true;
    if (options.want_gram_inverse)
      fit.gram_inverse = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xm);
    const Eigen::MatrixXd& R = qr.matrixR();
    const double lead = std::abs(R(0, 0));
    const double tail = std::abs(R(m - 1, m - 1));
    if (lead == 0.0 || tail < 1e-10 * lead)
      throw SingularFitError("ols_fit: rank-deficient design on model " +
                                 model_to_string(model.indices()),
                             model.indices());
    fit.coefficients = qr.solve(data.y);
    if (options.want_gram_inverse) {
      // (X^T X)^{-1} = P R^{-1} R^{-T} P^T from the pivoted factorization.
      Eigen::MatrixXd rinv = R.topLeftCorner(m, m)
                                 .triangularView<Eigen::Upper>()
                                 .solve(Eigen::MatrixXd::Identity(m, m));
      Eigen::MatrixXd inv = rinv * rinv.transpose();
      const auto& perm = qr.colsPermutation();
      fit.gram_inverse = perm * inv * perm.transpose();
    }
  }

  fit.fitted = Xm * fit.coefficients;
  fit.rss = (data.y - fit.fitted).squaredNorm();
  return fit;
}

double ridge_fallback_tau(const Dataset& data, const IndexSet& model) {
  if (model.empty()) return 0.0;
  double trace = 0.0;
  for (int j : model) trace += data.X.col(j).squaredNorm();
  return 1e-6 * trace / model.size();
}

SplitPlan split_even(int n, const Rng& rng) {
  if (n < 4) throw ConfigError("split_even: need n >= 4 to refit on a half");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng r = rng.child(0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(r.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  const int n1 = (n + 1) / 2;
  SplitPlan plan;
  plan.first.assign(order.begin(), order.begin() + n1);
  plan.second.assign(order.begin() + n1, order.end());
  std::sort(plan.first.begin(), plan.first.end());
  std::sort(plan.second.begin(), plan.second.end());
  return plan;
}

double sample_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw ConfigError("sample_correlation: length mismatch");
  if (x.size() < 2) throw ConfigError("sample_correlation: need at least two points");
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::VectorXd xc = x.array() - mx;
  const Eigen::VectorXd yc = y.array() - my;
  const double sx = xc.norm();
  const double sy = yc.norm();
  if (sx == 0.0 || sy == 0.0) throw DegenerateInputError("sample_correlation: constant input");
  return xc.dot(yc) / (sx * sy);
}

double min_eigenvalue_gram(const Dataset& data, const IndexSet& model) {
  const int m = model.size();
  if (m == 0) return std::numeric_limits<double>::infinity();
  if (m > data.n()) throw ConfigError("min_eigenvalue_gram: |M| must not exceed n");
  Eigen::MatrixXd Xm(data.n(), m);
  for (int k = 0; k < m; ++k) Xm.col(k) = data.X.col(model[k]);
  Eigen::MatrixXd gram = (Xm.transpose() * Xm) / static_cast<double>(data.n());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  return solver.eigenvalues()(0);
}

}  // namespace rcvvar
