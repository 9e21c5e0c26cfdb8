#include "rcvvar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcvvar/stats.hpp"

namespace rcvvar {

namespace {

// Refit with the opt-in flagged ridge fallback on rank deficiency.
OlsFit refit(const Dataset& data, const IndexSet& model, const RefitPolicy& policy) {
  try {
    return ols_fit(data, model);
  } catch (const SingularFitError&) {
    if (!policy.ridge_fallback) throw;
    return ols_fit(data, model, {.ridge = ridge_fallback_tau(data, model)});
  }
}

Eigen::VectorXd subset(const Eigen::VectorXd& v, const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

Eigen::VectorXd truth_residual(const Dataset& data, const std::map<int, double>& beta) {
  Eigen::VectorXd r = data.y;
  for (const auto& [j, coef] : beta) {
    if (j < 0 || j >= data.p()) throw ConfigError("beta index out of range");
    r -= coef * data.X.col(j);
  }
  return r;
}

}  // namespace

VarianceReport naive_two_stage(const Dataset& data, const SelectorSpec& selector, const Rng& rng,
                               const RefitPolicy& policy) {
  const IndexSet model = select_model(data, selector, rng.child(streams::select_first));
  if (model.size() >= data.n())
    throw ConfigError("naive_two_stage: selected model size must stay below n");
  const OlsFit fit = refit(data, model, policy);
  VarianceReport report;
  report.method = "naive-" + selector.name();
  report.df = data.n() - model.size();
  report.sigma2 = fit.rss / report.df;
  report.models = {model};
  report.ridge_fallback_used = fit.ridge_fallback_used;
  return report;
}

double gamma_hat(const Dataset& data, const IndexSet& model, const Eigen::VectorXd& eps) {
  if (eps.size() != data.n()) throw ConfigError("gamma_hat: eps length must equal n");
  if (model.size() >= data.n()) throw ConfigError("gamma_hat: |M| must stay below n");
  if (model.empty()) return 0.0;
  const double total = eps.squaredNorm();
  if (total == 0.0) return 0.0;
  Eigen::MatrixXd Xm(data.n(), model.size());
  for (int k = 0; k < model.size(); ++k) Xm.col(k) = data.X.col(model[k]);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xm);
  const Eigen::VectorXd projected = Xm * qr.solve(eps);
  const double ratio = std::clamp(projected.squaredNorm() / total, 0.0, 1.0);
  return std::sqrt(ratio);
}

double corrected_naive_sigma2(const VarianceReport& report) {
  if (!report.gamma) throw ConfigError("corrected_naive_sigma2: report carries no gamma");
  const double g2 = *report.gamma * *report.gamma;
  if (!(g2 < 1.0)) throw NumericalError("corrected_naive_sigma2: gamma at 1");
  return report.sigma2 / (1.0 - g2);
}

VarianceReport rcv(const Dataset& data, const SelectorSpec& selector, const Rng& rng,
                   bool weighted, const RefitPolicy& policy) {
  const SplitPlan plan = split_even(data.n(), rng.child(streams::split));
  const Dataset first = data.rows(plan.first);
  const Dataset second = data.rows(plan.second);
  const IndexSet m1 = select_model(first, selector, rng.child(streams::select_first));
  const IndexSet m2 = select_model(second, selector, rng.child(streams::select_second));
  if (m1.size() >= second.n() || m2.size() >= first.n())
    throw ConfigError("rcv: selected model too large to refit on the opposite half");

  // Select on one half, refit and estimate on the other.
  const OlsFit fit1 = refit(second, m1, policy);
  const OlsFit fit2 = refit(first, m2, policy);
  const double sigma1 = fit1.rss / (second.n() - m1.size());
  const double sigma2 = fit2.rss / (first.n() - m2.size());

  VarianceReport report;
  report.method = std::string(weighted ? "wrcv-" : "rcv-") + selector.name();
  report.df = data.n() - m1.size() - m2.size();
  report.sigma2 = weighted ? (fit1.rss + fit2.rss) / report.df : 0.5 * (sigma1 + sigma2);
  report.models = {m1, m2};
  report.split = plan;
  report.half_estimates = {sigma1, sigma2};
  report.ridge_fallback_used = fit1.ridge_fallback_used || fit2.ridge_fallback_used;
  return report;
}

RepeatedRcv repeated_rcv(const Dataset& data, const SelectorSpec& selector, int repeats,
                         const Rng& rng, bool weighted, const RefitPolicy& policy) {
  if (repeats < 1) throw ConfigError("repeated_rcv: need at least one split");
  RepeatedRcv out;
  std::string last_error = "repeated_rcv: all splits failed";
  bool have_first = false;
  for (int r = 0; r < repeats; ++r) {
    try {
      VarianceReport one = rcv(data, selector, rng.child(static_cast<std::uint64_t>(r)), weighted,
                               policy);
      out.split_values.push_back(one.sigma2);
      if (!have_first) {
        out.report = one;
        have_first = true;
      } else {
        out.report.ridge_fallback_used |= one.ridge_fallback_used;
      }
    } catch (const std::exception& err) {
      ++out.failures;
      last_error = err.what();
    }
  }
  if (out.split_values.empty()) throw NumericalError(last_error);
  out.report.method = "rrcv-" + selector.name();
  out.report.sigma2 = mean(out.split_values);
  return out;
}

VarianceReport oracle_variance(const Dataset& data, const std::map<int, double>& beta_true) {
  const Eigen::VectorXd r = truth_residual(data, beta_true);
  VarianceReport report;
  report.method = "oracle";
  report.df = data.n();
  report.sigma2 = r.squaredNorm() / data.n();
  report.gamma = 0.0;
  report.vmv = 0.0;
  return report;
}

namespace {

VarianceReport plugin_from_fit(const Dataset& data, const LassoFit& fit, const IndexSet& keep,
                               const std::string& method) {
  const int s_hat = fit.support.size();
  if (s_hat >= data.n()) throw NumericalError(method + ": support reached n");
  const Eigen::VectorXd r = data.y - fit.fitted(data.X);
  VarianceReport report;
  report.method = method;
  report.df = data.n() - s_hat;
  report.sigma2 = r.squaredNorm() / report.df;
  report.models = {fit.support.unite(keep)};
  report.converged = fit.converged;
  return report;
}

}  // namespace

VarianceReport plugin_lasso_variance(const Dataset& data, double lambda) {
  return plugin_from_fit(data, lasso_fit(data, lambda), data.keep, "plugin-lasso");
}

VarianceReport plugin_lasso_variance(const Dataset& data, const SelectorSpec& cv_spec,
                                     const Rng& rng) {
  if (cv_spec.kind != SelectorSpec::Kind::lasso)
    throw ConfigError("plugin_lasso_variance: selector must be lasso");
  const CvResult cv = cross_validate_lambda(data, cv_spec, rng);
  return plugin_from_fit(data, cv.fit, data.keep, "plugin-lasso");
}

VarianceReport plugin_scad_variance(const Dataset& data, double lambda, double a) {
  return plugin_from_fit(data, scad_lla(data, lambda, a), data.keep, "plugin-scad");
}

VarianceReport plugin_scad_variance(const Dataset& data, const SelectorSpec& cv_spec,
                                    const Rng& rng) {
  if (cv_spec.kind != SelectorSpec::Kind::scad)
    throw ConfigError("plugin_scad_variance: selector must be scad");
  const CvResult cv = cross_validate_lambda(data, cv_spec, rng);
  return plugin_from_fit(data, cv.fit, data.keep, "plugin-scad");
}

namespace {

VarianceReport cv_variance(const Dataset& data, int folds, std::vector<double> grid, bool scad,
                           double a, const Rng& rng, const std::string& method) {
  SelectorSpec spec = scad ? SelectorSpec::ScadCv(folds, a, std::move(grid))
                           : SelectorSpec::LassoCv(folds, std::move(grid));
  const CvResult cv = cross_validate_lambda(data, spec, rng);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [lambda, err] : cv.curve) best = std::min(best, err);
  VarianceReport report;
  report.method = method;
  report.sigma2 = best;
  report.df = data.n();  // the defining formula divides by n, no correction
  report.models = {cv.fit.support.unite(data.keep)};
  report.converged = cv.fit.converged;
  return report;
}

}  // namespace

VarianceReport cv_lasso_variance(const Dataset& data, int folds, std::vector<double> lambda_grid,
                                 const Rng& rng) {
  return cv_variance(data, folds, std::move(lambda_grid), false, 3.7, rng, "cv-lasso");
}

VarianceReport cv_scad_variance(const Dataset& data, int folds, std::vector<double> lambda_grid,
                                double a, const Rng& rng) {
  return cv_variance(data, folds, std::move(lambda_grid), true, a, rng, "cv-scad");
}

double vmv(const std::map<int, double>& beta_true, const CovarianceSpec& cov, double sigma2,
           const IndexSet& missed) {
  if (!(sigma2 > 0.0)) throw ConfigError("vmv: sigma2 must be positive");
  double quad = 0.0;
  for (int i : missed) {
    const auto bi = beta_true.find(i);
    if (bi == beta_true.end()) continue;
    for (int j : missed) {
      const auto bj = beta_true.find(j);
      if (bj == beta_true.end()) continue;
      quad += bi->second * bj->second * cov.correlation(i, j);
    }
  }
  return quad / sigma2;
}

double vmv(const std::map<int, double>& beta_true, const Eigen::MatrixXd& X_sample, double sigma2,
           const IndexSet& missed) {
  if (!(sigma2 > 0.0)) throw ConfigError("vmv: sigma2 must be positive");
  const auto n = static_cast<double>(X_sample.rows());
  double quad = 0.0;
  for (int i : missed) {
    const auto bi = beta_true.find(i);
    if (bi == beta_true.end()) continue;
    const double mi = X_sample.col(i).mean();
    for (int j : missed) {
      const auto bj = beta_true.find(j);
      if (bj == beta_true.end()) continue;
      const double mj = X_sample.col(j).mean();
      const double cov_ij =
          (X_sample.col(i).dot(X_sample.col(j)) - n * mi * mj) / (n - 1.0);
      quad += bi->second * bj->second * cov_ij;
    }
  }
  return quad / sigma2;
}

}  // namespace rcvvar
