#pragma once

#include <vector>

#include "rcvvar/core.hpp"
#include "rcvvar/estimators.hpp"

namespace rcvvar {

struct ConfidenceInterval {
  int index = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
};

// beta_j +- z_{1-alpha/2} c_j sigma for every j in the fitted model, with
// c_j the square root of the j-th diagonal of (X_M^T X_M)^{-1}.  Normal,
// not t, quantiles.  The fit must carry its gram inverse.
std::vector<ConfidenceInterval> ci_coefficients(const OlsFit& fit, double sigma, double level);

struct RcvJointEstimate {
  IndexSet model;                // intersection of the two half models
  Eigen::VectorXd coefficients;  // average of the two half refits
  Eigen::MatrixXd covariance;    // (S1 + S2) sigma^2 / 4
};

// Joint covariance of the refitted coefficients over M1 intersect M2,
// (S1 + S2) sigma_rcv^2 / 4 with S_h the half-h gram inverse on the
// intersection.  Throws InferenceUnavailableError when the intersection is
// empty.
RcvJointEstimate rcv_joint_covariance(const Dataset& data, const VarianceReport& rcv_report,
                                      double sigma2_rcv);

enum class Criterion { aic, bic };

// |y - fitted|^2 / (n sigma^2) plus (2/n) df for AIC or (log n / n) df for
// BIC; for lasso fits df is the support size.
double information_criterion(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                             double sigma2, double df_hat, Criterion kind);

// 1 - RSS / sum (y_t - ybar)^2.
double r_squared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted);

struct MarginalFit {
  Eigen::VectorXd slopes;              // per-column simple-regression slope
  std::vector<unsigned char> constant;  // flagged columns reported as slope 0
};

// Marginal regression slopes from E(Y | X_j) = alpha_j + beta_j X_j.
MarginalFit marginal_betas(const Dataset& data);

// Companion matrix for simultaneous marginal inference: sample covariance
// of X_i and X_j divided by both sample variances.
Eigen::MatrixXd marginal_s_matrix(const Dataset& data);

}  // namespace rcvvar
