#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcvvar/core.hpp"
#include "rcvvar/selectors.hpp"

namespace rcvvar {

// A residual-variance estimate with the models and diagnostics behind it.
struct VarianceReport {
  std::string method;
  double sigma2 = 0.0;
  int df = 0;
  std::vector<IndexSet> models;  // selected model(s): one, or first/second half
  std::optional<SplitPlan> split;
  std::optional<std::pair<double, double>> half_estimates;  // (sigma1^2, sigma2^2)
  std::optional<double> gamma;  // spurious-correlation statistic, truth-aware
  std::optional<double> vmv;    // variance of missing variables, truth-aware
  bool ridge_fallback_used = false;
  bool converged = true;
};

struct RefitPolicy {
  // Retry rank-deficient refits with the flagged ridge fallback instead of
  // propagating SingularFitError.
  bool ridge_fallback = true;
};

// Select on the full data, refit on the same data:
// sigma^2 = y^T (I - P_M) y / (n - |M|).  Downward biased in high
// dimensions; kept as the baseline the refitted estimators are compared to.
VarianceReport naive_two_stage(const Dataset& data, const SelectorSpec& selector,
                               const Rng& rng, const RefitPolicy& policy = {});

// gamma_n = sqrt(eps^T P_M eps / eps^T eps), the fraction of realized noise
// the model predicts.  Simulation-only diagnostic (needs the noise vector).
double gamma_hat(const Dataset& data, const IndexSet& model, const Eigen::VectorXd& eps);

// Bias-corrected ratio sigma^2 / (1 - gamma^2) for a report carrying gamma.
double corrected_naive_sigma2(const VarianceReport& report);

// Refitted cross-validation: split in half, select on each half, refit and
// estimate on the opposite half, average (or take the weighted form, which
// pools the two residual sums over n - |M1| - |M2|).
VarianceReport rcv(const Dataset& data, const SelectorSpec& selector, const Rng& rng,
                   bool weighted = false, const RefitPolicy& policy = {});

struct RepeatedRcv {
  VarianceReport report;             // averaged estimate
  std::vector<double> split_values;  // per-split estimates, for dispersion
  int failures = 0;
};

// Average of R independent rcv runs on derived sub-seeds; failed splits are
// skipped and counted, all-failed throws.
RepeatedRcv repeated_rcv(const Dataset& data, const SelectorSpec& selector, int repeats,
                         const Rng& rng, bool weighted = false, const RefitPolicy& policy = {});

// Oracle estimator n^{-1} sum (y_i - x_i^T beta*)^2 (truth-aware benchmark).
VarianceReport oracle_variance(const Dataset& data, const std::map<int, double>& beta_true);

// Plug-in lasso estimator: sum of squared lasso residuals over n - s_hat.
VarianceReport plugin_lasso_variance(const Dataset& data, double lambda);
VarianceReport plugin_lasso_variance(const Dataset& data, const SelectorSpec& cv_spec,
                                     const Rng& rng);

// K-fold cross-validated lasso estimator: min over lambda of the mean
// out-of-fold squared error (K = n is leave-one-out).  df is reported as n,
// following the defining formula (no degrees-of-freedom correction).
VarianceReport cv_lasso_variance(const Dataset& data, int folds,
                                 std::vector<double> lambda_grid, const Rng& rng);

// Same cross-validated form with SCAD fits in place of the lasso.
VarianceReport cv_scad_variance(const Dataset& data, int folds,
                                std::vector<double> lambda_grid, double a, const Rng& rng);

// Plug-in SCAD estimator on the local-linear-approximation fit.
VarianceReport plugin_scad_variance(const Dataset& data, double lambda, double a);
VarianceReport plugin_scad_variance(const Dataset& data, const SelectorSpec& cv_spec,
                                    const Rng& rng);

// Variance of missing variables beta_S^T Sigma_SS beta_S / sigma^2 for the
// missed true-support columns S, under the known simulation covariance or a
// sample proxy.
double vmv(const std::map<int, double>& beta_true, const CovarianceSpec& cov, double sigma2,
           const IndexSet& missed);
double vmv(const std::map<int, double>& beta_true, const Eigen::MatrixXd& X_sample,
           double sigma2, const IndexSet& missed);

}  // namespace rcvvar
