#pragma once

#include <string>
#include <vector>

#include "rcvvar/core.hpp"

namespace rcvvar {

// Closed description of a stage-one selection procedure.
struct SelectorSpec {
  enum class Kind { sis, isis, stepwise, lasso, scad };
  Kind kind = Kind::sis;
  int size = 5;                     // target model size (sis/isis/stepwise)
  int steps = 2;                    // isis batch count
  std::vector<double> lambda_grid;  // empty uses the default path
  int folds = 5;                    // cross-validation folds (lasso/scad)
  double scad_a = 3.7;

  static SelectorSpec Sis(int s);
  static SelectorSpec Isis(int s, int steps = 2);
  static SelectorSpec Stepwise(int s);
  static SelectorSpec LassoCv(int folds = 5, std::vector<double> grid = {});
  static SelectorSpec ScadCv(int folds = 5, double a = 3.7, std::vector<double> grid = {});

  void validate(const Dataset& data) const;
  std::string name() const;
};

// Penalized least-squares fit.  The solver works on columns standardized to
// mean 0 and norm sqrt(n); keep-list columns stay raw and unpenalized.
// `coefficients` are reported on the raw scale and `offset` is the constant
// the column centering introduces, so the fitted value at a row x is
// x . coefficients + offset.
struct LassoFit {
  double lambda = 0.0;
  Eigen::VectorXd coefficients;  // raw scale, length p
  Eigen::VectorXd beta_std;      // standardized scale, length p
  double offset = 0.0;
  IndexSet support;
  int n_iterations = 0;
  bool converged = true;

  Eigen::VectorXd fitted(const Eigen::MatrixXd& X) const;
};

// Sure independence screening: the s columns with largest absolute marginal
// correlation with y, ties broken by lower index, constant columns ranked
// last.  Keep-list columns are added on top and do not count toward s
// unless already among the top s.
IndexSet sis(const Dataset& data, int s);

// Greedy forward selection by exact residual-sum-of-squares reduction.
// Columns that become numerically collinear with the current model are
// skipped; if nothing remains addable the set is returned short and
// *reached_target is cleared.
IndexSet stepwise_forward(const Dataset& data, int s, bool* reached_target = nullptr);

// Iterative SIS: equal batches of s/steps columns ranked by correlation
// with the running least-squares residual.
IndexSet isis(const Dataset& data, int s, int steps = 2, bool* reached_target = nullptr);

// Largest penalty with an all-zero solution: max_j |x_j^T y| / n over
// standardized non-kept columns (after projecting out kept columns).
double lambda_max(const Dataset& data);

// 100 log-spaced penalties from lambda_max down to 1e-3 lambda_max.
std::vector<double> default_lambda_grid(const Dataset& data);

// Coordinate-descent solution of (1/2n)|y - X b|^2 + lambda |b|_1 in the
// standardized metric.  Convergence: max coefficient change below
// 1e-7 max(1, |b|_inf); gives up (converged = false) after 1e5 sweeps.
LassoFit lasso_fit(const Dataset& data, double lambda);

// SCAD penalty derivative: lambda for t <= lambda, (a lambda - t)+/(a-1)
// beyond, 0 past a lambda.
double scad_penalty_derivative(double t, double lambda, double a);

// SCAD penalty itself (integral of the derivative).
double scad_penalty(double t, double lambda, double a);

// SCAD via local linear approximation: iteratively reweighted lasso started
// at the lasso solution, weights scad_penalty_derivative(|b_j|)/lambda.
// The (1/2n)|y - Xb|^2 + sum rho_lambda(|b_j|) objective is non-increasing
// across outer iterations; stops on coefficient/support stabilization or
// after 20 outer rounds.
LassoFit scad_lla(const Dataset& data, double lambda, double a = 3.7);

// Maximum KKT violation of a lasso fit in the standardized metric:
// max over support of ||g_j| - lambda| and over the rest of (|g_j| - lambda)+
// with g_j = x_j^T r / n.  Converged fits stay below 1e-6.
double kkt_violation(const Dataset& data, const LassoFit& fit);

struct CvResult {
  double lambda = 0.0;
  LassoFit fit;                                 // refit on the full data at lambda
  std::vector<std::pair<double, double>> curve;  // (lambda, mean out-of-fold squared error)
};

// K-fold cross-validation over the penalty grid; fold assignment is
// deterministic from rng, the winning lambda minimizes mean out-of-fold
// squared prediction error (ties to the larger penalty).
CvResult cross_validate_lambda(const Dataset& data, const SelectorSpec& spec, const Rng& rng);

// Dispatch: the selected model of a SelectorSpec (support of the
// cross-validated fit for lasso/scad).
IndexSet select_model(const Dataset& data, const SelectorSpec& spec, const Rng& rng);

// Model of a given size from a selector family, for model-size sweeps:
// sis/isis/stepwise take the size directly; lasso/scad walk the penalty
// path until the support reaches s and trim to the s largest standardized
// coefficients.  Kept columns ride along and do not count toward s.
IndexSet model_of_size(const Dataset& data, SelectorSpec::Kind family, int s, const Rng& rng);

}  // namespace rcvvar
