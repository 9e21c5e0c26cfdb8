#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "rcvvar/errors.hpp"
#include "rcvvar/rng.hpp"

namespace rcvvar {

// Ordered set of column indices (a candidate model M).
class IndexSet {
 public:
  IndexSet() = default;
  // Indices must be strictly increasing and nonnegative.
  explicit IndexSet(std::vector<int> indices);
  // Sorts and rejects duplicates.
  static IndexSet from_unsorted(std::vector<int> indices);

  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  int operator[](int i) const { return indices_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool contains(int j) const;
  bool contains_all(const IndexSet& other) const;
  IndexSet unite(const IndexSet& other) const;
  IndexSet intersect(const IndexSet& other) const;
  IndexSet difference(const IndexSet& other) const;

  bool operator==(const IndexSet& other) const = default;

 private:
  std::vector<int> indices_;
};

// Population covariance family for the simulated designs; every column has
// unit marginal variance.
struct CovarianceSpec {
  enum class Kind { identity, equicorrelated, ar1 };
  Kind kind = Kind::identity;
  double rho = 0.0;

  static CovarianceSpec identity() { return {}; }
  static CovarianceSpec equicorrelated(double rho) { return {Kind::equicorrelated, rho}; }
  static CovarianceSpec ar1(double rho) { return {Kind::ar1, rho}; }

  // Positive definiteness of the implied p x p matrix: |rho| < 1 and, for
  // the equicorrelated family, rho > -1/(p-1).
  void validate(int p) const;
  // Population correlation between columns i and j.
  double correlation(int i, int j) const;
  std::string name() const;
};

// Design matrix with response, column labels, and a keep-list of columns a
// selector is never allowed to drop (used for the intercept and always-kept
// predictors in real-data mode).
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> labels;  // empty means unnamed (x1, x2, ...)
  IndexSet keep;

  Dataset(Eigen::MatrixXd X_in, Eigen::VectorXd y_in,
          std::vector<std::string> labels_in = {}, IndexSet keep_in = {});

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
  std::string label(int j) const;

  // Row subset in the given order; labels and keep-list carry over.
  Dataset rows(const std::vector<int>& row_indices) const;
};

// Random even partition of {0,...,n-1}; sizes differ by at most one, with
// the first part taking the extra row when n is odd.
struct SplitPlan {
  std::vector<int> first;
  std::vector<int> second;
};

// Least-squares fit of y on the columns in `model`.
struct OlsFit {
  IndexSet model;
  Eigen::VectorXd coefficients;  // over model, in model order
  double rss = 0.0;
  int df_resid = 0;              // n - |model|
  Eigen::VectorXd fitted;        // length n
  Eigen::MatrixXd gram_inverse;  // (X_M^T X_M)^{-1}; empty unless requested
  bool ridge_fallback_used = false;
};

struct OlsOptions {
  bool want_gram_inverse = false;
  // Positive value solves (X^T X + ridge I) instead; used by the flagged
  // fallback for rank-deficient refits.
  double ridge = 0.0;
};

// i.i.d. rows from N(0, Sigma(cov)).  Identity fills columns directly;
// equicorrelated uses sqrt(rho) Z0 + sqrt(1-rho) Zj for rho >= 0 (and the
// symmetric square root a I + b 11^T otherwise); ar1 runs the stationary
// recursion Xj = rho X_{j-1} + sqrt(1-rho^2) Zj.
Eigen::MatrixXd generate_design(int n, int p, const CovarianceSpec& cov, const Rng& rng);

// y = X beta + sigma * eps with standard Gaussian eps.  The realized noise
// vector is written to *eps_out when given (simulation diagnostics need it).
Eigen::VectorXd simulate_response(const Eigen::MatrixXd& X, const std::map<int, double>& beta,
                                  double sigma, const Rng& rng,
                                  Eigen::VectorXd* eps_out = nullptr);

// Rank-revealing QR solve of y on X_M.  Empty M returns rss = |y|^2 and
// df = n.  Throws SingularFitError when the trailing R diagonal falls below
// 1e-10 of the leading one; callers may retry with OlsOptions::ridge.
OlsFit ols_fit(const Dataset& data, const IndexSet& model, const OlsOptions& options = {});

// Ridge parameter used by the opt-in fallback: 1e-6 tr(X_M^T X_M)/|M|.
double ridge_fallback_tau(const Dataset& data, const IndexSet& model);

SplitPlan split_even(int n, const Rng& rng);

// Centered Pearson correlation; throws DegenerateInputError on constant
// input.
double sample_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Smallest eigenvalue of (1/n) X_M^T X_M, a refit-stage conditioning
// diagnostic.  Empty model returns +infinity.
double min_eigenvalue_gram(const Dataset& data, const IndexSet& model);

}  // namespace rcvvar
