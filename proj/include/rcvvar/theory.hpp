#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcvvar/core.hpp"

namespace rcvvar {

// max_j |corr(X_j, eps)|: the spurious-correlation statistic of the null
// model.
double max_abs_correlation(const Eigen::MatrixXd& X, const Eigen::VectorXd& eps);

// Gumbel centering d_q = sqrt(2 log q) - log(sqrt(4 pi log q)) / sqrt(2 log q).
double gumbel_centering(double q);

// t-statistic transform sqrt(n-2) r / sqrt(1 - r^2) of a sample correlation.
double t_transform(double r, int n);

struct GumbelQuantities {
  double d_2p = 0.0;
  std::function<double(double)> t_transform;  // r -> sqrt(n-2) r / sqrt(1-r^2)
};

GumbelQuantities gumbel_quantities(int n, int p);

// Monte Carlo draws of gamma_n under the null model (standard normal design
// and noise).
struct ExtremeCorrSummary {
  int n = 0;
  int p = 0;
  std::vector<double> samples;
  double d_2p = 0.0;
  double predicted_scale = 0.0;   // sqrt(2 log p / n)
  double predicted_median = 0.0;  // d_2p / sqrt(n)
  double sample_median = 0.0;
};

ExtremeCorrSummary sample_gamma_null(int n, int p, int reps, std::uint64_t seed, int threads = 1);

// Lower tail bound P{gamma_n > sqrt(log(p/c) / 2n)} > 1 - exp(-c), checked
// empirically with a 3-standard-error margin.  Requires log(p/c) <= n + 2.
struct TailBoundCheck {
  double threshold = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  int reps = 0;
  bool pass = false;
};

TailBoundCheck tail_bound_check(int n, int p, double c, int reps, std::uint64_t seed,
                                int threads = 1);

// Noise law for the quadratic-form checks.
struct NoiseSpec {
  enum class Kind { gaussian, two_point };
  Kind kind = Kind::gaussian;
  double scale = 1.0;  // sigma for gaussian; the two-point law is +-scale

  double second_moment() const { return scale * scale; }
  double fourth_moment() const {
    const double s2 = scale * scale;
    return kind == Kind::gaussian ? 3.0 * s2 * s2 : s2 * s2;
  }
};

// Exact variance of xi^T P xi: (E xi^4 - sigma^4) sum P_ii^2
// + 2 sigma^4 sum_{i != j} P_ij^2.
double quad_form_variance_exact(const Eigen::MatrixXd& P, double second_moment,
                                double fourth_moment);

struct QuadFormMoments {
  double mean_emp = 0.0;
  double var_emp = 0.0;
  double mean_theory = 0.0;  // sigma^2 tr P
  double var_exact = 0.0;
  double var_bound = 0.0;  // (E xi^4 + sigma^4) tr P^2
};

QuadFormMoments quadratic_form_moments(const Eigen::MatrixXd& P, const NoiseSpec& noise,
                                       int reps, const Rng& rng);

// Kolmogorov-Smirnov check of sqrt(n)(sigma2_hat - sigma2)/sqrt(E eps^4 - sigma^4)
// against the standard normal.  expect_law = false marks estimators without
// a limit law (report only, no pass criterion).
struct LimitLawReport {
  std::string method;
  int reps = 0;
  double ks = 0.0;
  double critical = 0.0;
  bool pass = false;
  bool has_limit_law = true;
  double mean_standardized = 0.0;
  double sd_standardized = 0.0;
};

LimitLawReport limit_law_from_draws(const std::string& method, const std::vector<double>& sigma2_draws,
                                    int n, double sigma2, double fourth_moment, double level,
                                    bool expect_law);

}  // namespace rcvvar
