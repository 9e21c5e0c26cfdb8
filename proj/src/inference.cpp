#include "rcvvar/inference.hpp"

#include <cmath>

#include "rcvvar/stats.hpp"

namespace rcvvar {

std::vector<ConfidenceInterval> ci_coefficients(const OlsFit& fit, double sigma, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("ci_coefficients: level outside (0,1)");
  if (fit.df_resid <= 0) throw ConfigError("ci_coefficients: fit has no residual df");
  if (fit.gram_inverse.rows() != fit.model.size())
    throw ConfigError("ci_coefficients: fit carries no gram inverse");
  if (!(sigma >= 0.0)) throw ConfigError("ci_coefficients: sigma must be nonnegative");
  const double z = normal_quantile(0.5 * (1.0 + level));
  std::vector<ConfidenceInterval> out;
  out.reserve(static_cast<std::size_t>(fit.model.size()));
  for (int k = 0; k < fit.model.size(); ++k) {
    const double c2 = fit.gram_inverse(k, k);
    if (!(c2 > 0.0)) throw NumericalError("ci_coefficients: nonpositive gram diagonal");
    const double half = z * std::sqrt(c2) * sigma;
    ConfidenceInterval ci;
    ci.index = fit.model[k];
    ci.estimate = fit.coefficients(k);
    ci.lower = ci.estimate - half;
    ci.upper = ci.estimate + half;
    ci.level = level;
    out.push_back(ci);
  }
  return out;
}

RcvJointEstimate rcv_joint_covariance(const Dataset& data, const VarianceReport& rcv_report,
                                      double sigma2_rcv) {
  if (!rcv_report.split || rcv_report.models.size() != 2)
    throw ConfigError("rcv_joint_covariance: report does not carry a two-half rcv run");
  const IndexSet model = rcv_report.models[0].intersect(rcv_report.models[1]);
  if (model.empty())
    throw InferenceUnavailableError("rcv_joint_covariance: empty model intersection");
  const Dataset first = data.rows(rcv_report.split->first);
  const Dataset second = data.rows(rcv_report.split->second);
  const OlsFit fit1 = ols_fit(first, model, {.want_gram_inverse = true});
  const OlsFit fit2 = ols_fit(second, model, {.want_gram_inverse = true});
  RcvJointEstimate out;
  out.model = model;
  out.coefficients = 0.5 * (fit1.coefficients + fit2.coefficients);
  out.covariance = 0.25 * sigma2_rcv * (fit1.gram_inverse + fit2.gram_inverse);
  return out;
}

double information_criterion(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                             double sigma2, double df_hat, Criterion kind) {
  if (!(sigma2 > 0.0)) throw ConfigError("information_criterion: sigma2 must be positive");
  if (df_hat < 0.0) throw ConfigError("information_criterion: df must be nonnegative");
  if (y.size() != fitted.size()) throw ConfigError("information_criterion: length mismatch");
  const double n = static_cast<double>(y.size());
  const double rss = (y - fitted).squaredNorm();
  const double penalty = kind == Criterion::aic ? 2.0 / n : std::log(n) / n;
  return rss / (n * sigma2) + penalty * df_hat;
}

double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  if (y.size() != fitted.size()) throw ConfigError("r_squared: length mismatch");
  const double ybar = y.mean();
  const double tss = (y.array() - ybar).matrix().squaredNorm();
  if (tss == 0.0) throw DegenerateInputError("r_squared: constant response");
  const double rss = (y - fitted).squaredNorm();
  return 1.0 - rss / tss;
}

MarginalFit marginal_betas(const Dataset& data) {
  const int p = data.p();
  MarginalFit out;
  out.slopes = Eigen::VectorXd::Zero(p);
  out.constant.assign(static_cast<std::size_t>(p), 0);
  const double ybar = data.y.mean();
  const Eigen::VectorXd yc = data.y.array() - ybar;
  for (int j = 0; j < p; ++j) {
    const double m = data.X.col(j).mean();
    const Eigen::VectorXd xc = data.X.col(j).array() - m;
    const double sxx = xc.squaredNorm();
    if (sxx <= 1e-24 * std::max(1.0, data.X.col(j).squaredNorm())) {
      out.constant[static_cast<std::size_t>(j)] = 1;
      continue;
    }
    out.slopes(j) = xc.dot(yc) / sxx;
  }
  return out;
}

Eigen::MatrixXd marginal_s_matrix(const Dataset& data) {
  const int p = data.p();
  const int n = data.n();
  Eigen::MatrixXd centered = data.X;
  Eigen::VectorXd variance(p);
  std::vector<unsigned char> constant(static_cast<std::size_t>(p), 0);
  for (int j = 0; j < p; ++j) {
    const double m = centered.col(j).mean();
    centered.col(j).array() -= m;
    variance(j) = centered.col(j).squaredNorm() / (n - 1.0);
    if (variance(j) <= 0.0) constant[static_cast<std::size_t>(j)] = 1;
  }
  Eigen::MatrixXd s = (centered.transpose() * centered) / (n - 1.0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (constant[static_cast<std::size_t>(i)] || constant[static_cast<std::size_t>(j)]) {
        s(i, j) = 0.0;
        continue;
      }
      s(i, j) /= variance(i) * variance(j);
    }
  return s;
}

}  // namespace rcvvar
