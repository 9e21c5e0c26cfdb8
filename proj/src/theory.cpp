#include "rcvvar/theory.hpp"

#include <cmath>

#include "rcvvar/parallel.hpp"
#include "rcvvar/stats.hpp"

namespace rcvvar {

double max_abs_correlation(const Eigen::MatrixXd& X, const Eigen::VectorXd& eps) {
  if (X.rows() != eps.size()) throw ConfigError("max_abs_correlation: length mismatch");
  if (X.rows() < 2) throw ConfigError("max_abs_correlation: need at least two rows");
  const double me = eps.mean();
  const Eigen::VectorXd ec = eps.array() - me;
  const double enorm = ec.norm();
  if (enorm == 0.0) throw DegenerateInputError("max_abs_correlation: constant noise vector");
  const Eigen::VectorXd cross = X.transpose() * ec;
  double best = 0.0;
  for (int j = 0; j < X.cols(); ++j) {
    const double m = X.col(j).mean();
    const double sq = (X.col(j).array() - m).matrix().squaredNorm();
    if (sq <= 0.0) continue;  // constant column carries no correlation
    best = std::max(best, std::abs(cross(j)) / (std::sqrt(sq) * enorm));
  }
  return best;
}

double gumbel_centering(double q) {
  if (!(q > 1.0)) throw ConfigError("gumbel_centering: q must exceed 1");
  const double root = std::sqrt(2.0 * std::log(q));
  return root - std::log(std::sqrt(4.0 * M_PI * std::log(q))) / root;
}

double t_transform(double r, int n) {
  if (n < 3) throw ConfigError("t_transform: need n >= 3");
  if (!(r > -1.0 && r < 1.0)) throw ConfigError("t_transform: r outside (-1,1)");
  return std::sqrt(static_cast<double>(n - 2)) * r / std::sqrt(1.0 - r * r);
}

GumbelQuantities gumbel_quantities(int n, int p) {
  if (p < 2 || n < 3) throw ConfigError("gumbel_quantities: need p >= 2 and n >= 3");
  GumbelQuantities out;
  out.d_2p = gumbel_centering(2.0 * p);
  out.t_transform = [n](double r) { return t_transform(r, n); };
  return out;
}

ExtremeCorrSummary sample_gamma_null(int n, int p, int reps, std::uint64_t seed, int threads) {
  if (reps < 1) throw ConfigError("sample_gamma_null: need at least one replication");
  ExtremeCorrSummary out;
  out.n = n;
  out.p = p;
  out.samples.resize(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](int rep) {
    Rng base(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    const Eigen::MatrixXd X =
        generate_design(n, p, CovarianceSpec::identity(), base.child(streams::design));
    Rng noise = base.child(streams::noise).child(0);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps(i) = noise.normal();
    out.samples[static_cast<std::size_t>(rep)] = max_abs_correlation(X, eps);
  });
  out.d_2p = gumbel_centering(2.0 * p);
  out.predicted_scale = std::sqrt(2.0 * std::log(static_cast<double>(p)) / n);
  out.predicted_median = out.d_2p / std::sqrt(static_cast<double>(n));
  out.sample_median = median(out.samples);
  return out;
}

TailBoundCheck tail_bound_check(int n, int p, double c, int reps, std::uint64_t seed,
                                int threads) {
  if (!(c > 0.0)) throw ConfigError("tail_bound_check: c must be positive");
  if (reps < 100) throw ConfigError("tail_bound_check: need at least 100 replications");
  if (std::log(static_cast<double>(p) / c) > n + 2)
    throw ConfigError("tail_bound_check: requires log(p/c) <= n + 2");
  const ExtremeCorrSummary draws = sample_gamma_null(n, p, reps, seed, threads);
  TailBoundCheck out;
  out.reps = reps;
  out.threshold = std::sqrt(std::log(static_cast<double>(p) / c) / (2.0 * n));
  int over = 0;
  for (double g : draws.samples)
    if (g > out.threshold) ++over;
  out.empirical = static_cast<double>(over) / reps;
  out.bound = 1.0 - std::exp(-c);
  out.margin = 3.0 * std::sqrt(out.bound * (1.0 - out.bound) / reps);
  out.pass = out.empirical >= out.bound - out.margin;
  return out;
}

double quad_form_variance_exact(const Eigen::MatrixXd& P, double second_moment,
                                double fourth_moment) {
  const double sigma4 = second_moment * second_moment;
  double diag_sq = 0.0, off_sq = 0.0;
  for (int i = 0; i < P.rows(); ++i)
    for (int j = 0; j < P.cols(); ++j) {
      if (i == j)
        diag_sq += P(i, i) * P(i, i);
      else
        off_sq += P(i, j) * P(i, j);
    }
  return (fourth_moment - sigma4) * diag_sq + 2.0 * sigma4 * off_sq;
}

QuadFormMoments quadratic_form_moments(const Eigen::MatrixXd& P, const NoiseSpec& noise, int reps,
                                       const Rng& rng) {
  if (P.rows() != P.cols()) throw ConfigError("quadratic_form_moments: P must be square");
  if (!P.isApprox(P.transpose(), 1e-12))
    throw ConfigError("quadratic_form_moments: P must be symmetric");
  if (reps < 1) throw ConfigError("quadratic_form_moments: need at least one draw");
  const int m = static_cast<int>(P.rows());
  Rng r = rng.child(0);
  std::vector<double> draws(static_cast<std::size_t>(reps));
  Eigen::VectorXd xi(m);
  for (int rep = 0; rep < reps; ++rep) {
    for (int i = 0; i < m; ++i) {
      if (noise.kind == NoiseSpec::Kind::gaussian)
        xi(i) = noise.scale * r.normal();
      else
        xi(i) = (r.next_u64() & 1ULL) ? noise.scale : -noise.scale;
    }
    draws[static_cast<std::size_t>(rep)] = xi.dot(P * xi);
  }
  QuadFormMoments out;
  out.mean_emp = mean(draws);
  out.var_emp = sample_variance(draws);
  out.mean_theory = noise.second_moment() * P.trace();
  out.var_exact = quad_form_variance_exact(P, noise.second_moment(), noise.fourth_moment());
  out.var_bound = (noise.fourth_moment() + noise.second_moment() * noise.second_moment()) *
                  (P * P).trace();
  return out;
}

LimitLawReport limit_law_from_draws(const std::string& method,
                                    const std::vector<double>& sigma2_draws, int n, double sigma2,
                                    double fourth_moment, double level, bool expect_law) {
  if (sigma2_draws.size() < 8) throw ConfigError("limit_law_from_draws: too few draws");
  const double spread = std::sqrt(fourth_moment - sigma2 * sigma2);
  std::vector<double> standardized(sigma2_draws.size());
  for (std::size_t i = 0; i < sigma2_draws.size(); ++i)
    standardized[i] = std::sqrt(static_cast<double>(n)) * (sigma2_draws[i] - sigma2) / spread;
  LimitLawReport out;
  out.method = method;
  out.reps = static_cast<int>(sigma2_draws.size());
  out.mean_standardized = mean(standardized);
  out.sd_standardized = sample_sd(standardized);
  out.ks = ks_statistic_normal(standardized);
  out.critical = ks_critical(level, sigma2_draws.size());
  out.pass = out.ks <= out.critical;
  out.has_limit_law = expect_law;
  return out;
}

}  // namespace rcvvar
