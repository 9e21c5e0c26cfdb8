#include "rcvvar/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rcvvar {

namespace {

constexpr double kCdTol = 1e-7;
constexpr int kMaxSweeps = 100000;

// Columns prepared for selection work: non-kept columns centered and scaled
// to norm sqrt(n), kept columns raw and unpenalized, constant non-kept
// columns marked unusable (their coefficients stay zero).
struct WorkingDesign {
  Eigen::MatrixXd cols;
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
  Eigen::VectorXd colnorm2;
  std::vector<unsigned char> penalized;
  std::vector<unsigned char> usable;
  int n = 0;
  int p = 0;
};

WorkingDesign make_working(const Dataset& data) {
  WorkingDesign w;
  w.n = data.n();
  w.p = data.p();
  w.cols = data.X;
  w.center = Eigen::VectorXd::Zero(w.p);
  w.scale = Eigen::VectorXd::Ones(w.p);
  w.colnorm2.resize(w.p);
  w.penalized.assign(static_cast<std::size_t>(w.p), 1);
  w.usable.assign(static_cast<std::size_t>(w.p), 1);
  const double root_n = std::sqrt(static_cast<double>(w.n));
  for (int j = 0; j < w.p; ++j) {
    if (data.keep.contains(j)) {
      w.penalized[static_cast<std::size_t>(j)] = 0;
      w.colnorm2(j) = w.cols.col(j).squaredNorm();
      if (w.colnorm2(j) <= 0.0) w.usable[static_cast<std::size_t>(j)] = 0;
      continue;
    }
    const double m = w.cols.col(j).mean();
    w.cols.col(j).array() -= m;
    const double norm = w.cols.col(j).norm();
    if (norm <= 1e-12 * root_n) {
      w.usable[static_cast<std::size_t>(j)] = 0;
      w.cols.col(j).setZero();
      w.colnorm2(j) = 0.0;
      continue;
    }
    const double s = norm / root_n;
    w.center(j) = m;
    w.scale(j) = s;
    w.cols.col(j) /= s;
    w.colnorm2(j) = static_cast<double>(w.n);
  }
  return w;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Residual of y after least squares on the kept columns (zero model when
// the keep-list is empty); the reference point for lambda_max.
Eigen::VectorXd keep_residual(const Dataset& data) {
  if (data.keep.empty()) return data.y;
  OlsFit fit = ols_fit(data, data.keep);
  return data.y - fit.fitted;
}

struct CdState {
  Eigen::VectorXd beta;      // standardized scale, length p
  Eigen::VectorXd residual;  // y - cols * beta
  int sweeps = 0;
  bool converged = true;
  bool overflowed = false;  // support exceeded the df cap
};

// One cycle over the given column list; returns the largest coefficient
// move.
double cd_cycle(const WorkingDesign& w, double lambda, const Eigen::VectorXd& weights,
                const std::vector<int>& order, CdState& st) {
  double max_delta = 0.0;
  for (int j : order) {
    if (!w.usable[static_cast<std::size_t>(j)]) continue;
    const double pen = w.penalized[static_cast<std::size_t>(j)] ? lambda * weights(j) : 0.0;
    const double cn = w.colnorm2(j);
    const double z = w.cols.col(j).dot(st.residual) + st.beta(j) * cn;
    const double nb = soft_threshold(z / cn, pen * static_cast<double>(w.n) / cn);
    const double delta = nb - st.beta(j);
    if (delta != 0.0) {
      st.residual -= w.cols.col(j) * delta;
      st.beta(j) = nb;
      max_delta = std::max(max_delta, std::abs(delta));
    }
  }
  return max_delta;
}

std::vector<int> all_columns(int p) {
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

// Cyclic coordinate descent with an active-set strategy: iterate the
// nonzero/unpenalized set to convergence, then one full pass; stop when the
// full pass moves nothing.
void cd_solve(const WorkingDesign& w, double lambda, const Eigen::VectorXd& weights, CdState& st,
              int df_cap) {
  const std::vector<int> full = all_columns(w.p);
  while (st.sweeps < kMaxSweeps) {
    const double tol = kCdTol * std::max(1.0, st.beta.lpNorm<Eigen::Infinity>());
    ++st.sweeps;
    const double moved = cd_cycle(w, lambda, weights, full, st);
    std::vector<int> active;
    for (int j = 0; j < w.p; ++j)
      if (st.beta(j) != 0.0 || (!w.penalized[static_cast<std::size_t>(j)] &&
                                w.usable[static_cast<std::size_t>(j)]))
        active.push_back(j);
    if (df_cap > 0 && static_cast<int>(active.size()) > df_cap) {
      st.overflowed = true;
      st.converged = false;
      return;
    }
    if (moved < tol) {
      st.converged = true;
      return;
    }
    while (st.sweeps < kMaxSweeps) {
      ++st.sweeps;
      const double d = cd_cycle(w, lambda, weights, active, st);
      if (d < kCdTol * std::max(1.0, st.beta.lpNorm<Eigen::Infinity>())) break;
    }
  }
  st.converged = false;
}

LassoFit finalize_fit(const Dataset& data, const WorkingDesign& w, const CdState& st,
                      double lambda) {
  LassoFit fit;
  fit.lambda = lambda;
  fit.beta_std = st.beta;
  fit.coefficients = Eigen::VectorXd::Zero(w.p);
  fit.offset = 0.0;
  std::vector<int> support;
  for (int j = 0; j < w.p; ++j) {
    if (st.beta(j) == 0.0) continue;
    fit.coefficients(j) = st.beta(j) / w.scale(j);
    fit.offset -= fit.coefficients(j) * w.center(j);
    support.push_back(j);
  }
  fit.support = IndexSet(std::move(support));
  fit.n_iterations = st.sweeps;
  fit.converged = st.converged;
  return fit;
}

double lambda_max_working(const WorkingDesign& w, const Eigen::VectorXd& residual) {
  double lmax = 0.0;
  for (int j = 0; j < w.p; ++j) {
    if (!w.penalized[static_cast<std::size_t>(j)] || !w.usable[static_cast<std::size_t>(j)])
      continue;
    lmax = std::max(lmax, std::abs(w.cols.col(j).dot(residual)) / static_cast<double>(w.n));
  }
  return lmax;
}

std::vector<double> grid_from_lambda_max(double lmax) {
  if (!(lmax > 0.0)) lmax = 1e-12;
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[static_cast<std::size_t>(i)] = lmax * std::pow(1e-3, i / 99.0);
  return grid;
}

// SCAD local linear approximation at one penalty level, warm-started.
// Returns the number of outer rounds taken; the tracked objective is
// (1/2n)|r|^2 + sum scad_penalty(|b_j|) over penalized columns.
void lla_solve(const WorkingDesign& w, double lambda, double a, CdState& st, int df_cap) {
  auto objective = [&](const CdState& s) {
    double q = 0.5 * s.residual.squaredNorm() / static_cast<double>(w.n);
    for (int j = 0; j < w.p; ++j)
      if (w.penalized[static_cast<std::size_t>(j)])
        q += scad_penalty(std::abs(s.beta(j)), lambda, a);
    return q;
  };
  Eigen::VectorXd weights(w.p);
  double prev_obj = objective(st);
  Eigen::VectorXd prev_beta = st.beta;
  for (int outer = 0; outer < 20; ++outer) {
    for (int j = 0; j < w.p; ++j)
      weights(j) = scad_penalty_derivative(std::abs(st.beta(j)), lambda, a) / lambda;
    cd_solve(w, lambda, weights, st, df_cap);
    if (st.overflowed || !st.converged) return;
    const double obj = objective(st);
    bool support_stable = true;
    for (int j = 0; j < w.p && support_stable; ++j)
      if ((st.beta(j) != 0.0) != (prev_beta(j) != 0.0)) support_stable = false;
    const double move = (st.beta - prev_beta).lpNorm<Eigen::Infinity>();
    prev_beta = st.beta;
    if (support_stable && move < 1e-6) return;
    // The majorization guarantees descent; tolerate convergence-level noise.
    if (obj > prev_obj + 1e-10 * std::max(1.0, prev_obj)) return;
    prev_obj = obj;
  }
}

struct PathPoint {
  double lambda = 0.0;
  bool ok = false;
  Eigen::VectorXd beta;
  bool converged = true;
};

// Warm-started descent down the penalty grid.  scad = true runs the LLA
// rounds on top of a running lasso solution at each grid point.  Points
// after a support overflow are marked not ok.
std::vector<PathPoint> solve_path(const WorkingDesign& w, const Eigen::VectorXd& y,
                                  const std::vector<double>& grid, bool scad, double a,
                                  int df_cap) {
  std::vector<PathPoint> path(grid.size());
  CdState lasso_state{Eigen::VectorXd::Zero(w.p), y, 0, true, false};
  const Eigen::VectorXd unit_weights = Eigen::VectorXd::Ones(w.p);
  bool dead = false;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    path[g].lambda = grid[g];
    if (dead) continue;
    lasso_state.sweeps = 0;
    cd_solve(w, grid[g], unit_weights, lasso_state, df_cap);
    if (lasso_state.overflowed) {
      dead = true;
      continue;
    }
    if (!scad) {
      path[g].ok = true;
      path[g].beta = lasso_state.beta;
      path[g].converged = lasso_state.converged;
      continue;
    }
    // LLA initialized at the lasso solution for this penalty.
    CdState trial{lasso_state.beta, lasso_state.residual, 0, lasso_state.converged, false};
    lla_solve(w, grid[g], a, trial, df_cap);
    if (trial.overflowed) {
      dead = true;
      continue;
    }
    path[g].ok = true;
    path[g].beta = trial.beta;
    path[g].converged = trial.converged;
  }
  return path;
}

LassoFit fit_from_beta(const Dataset& data, const WorkingDesign& w, const Eigen::VectorXd& beta,
                       double lambda, int sweeps, bool converged) {
  CdState st{beta, data.y - w.cols * beta, sweeps, converged, false};
  return finalize_fit(data, w, st, lambda);
}

int default_df_cap(const Dataset& data) {
  return std::max(2, std::min(data.p(), (9 * data.n()) / 10));
}

std::vector<int> fold_assignment(int n, int folds, const Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng r = rng.child(streams::folds);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(r.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % folds;
  return fold_of;
}

struct CvCurve {
  std::vector<double> grid;
  std::vector<double> error;  // mean out-of-fold squared error; +inf invalid
  int best = -1;
};

CvCurve cv_curve(const Dataset& data, int folds, std::vector<double> grid, bool scad, double a,
                 const Rng& rng) {
  const int n = data.n();
  if (folds < 2 || folds > n) throw ConfigError("cross-validation: folds must lie in [2, n]");
  if (grid.empty()) grid = default_lambda_grid(data);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ConfigError("cross-validation: lambda grid must be positive");
    if (i > 0 && !(grid[i] < grid[i - 1]))
      throw ConfigError("cross-validation: lambda grid must be strictly decreasing");
  }
  const std::vector<int> fold_of = fold_assignment(n, folds, rng);

  std::vector<double> err(grid.size(), 0.0);
  std::vector<unsigned char> valid(grid.size(), 1);
  for (int k = 0; k < folds; ++k) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == k ? test_rows : train_rows).push_back(i);
    if (test_rows.empty()) continue;
    Dataset train = data.rows(train_rows);
    WorkingDesign w = make_working(train);
    const auto path = solve_path(w, train.y, grid, scad, a, default_df_cap(train));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (!path[g].ok) {
        valid[g] = 0;
        continue;
      }
      LassoFit fit = fit_from_beta(train, w, path[g].beta, grid[g], 0, path[g].converged);
      for (int i : test_rows) {
        const double pred = data.X.row(i).dot(fit.coefficients) + fit.offset;
        const double e = data.y(i) - pred;
        err[g] += e * e;
      }
    }
  }
  CvCurve out;
  out.grid = std::move(grid);
  out.error.resize(out.grid.size());
  for (std::size_t g = 0; g < out.grid.size(); ++g) {
    out.error[g] = valid[g] ? err[g] / static_cast<double>(n)
                            : std::numeric_limits<double>::infinity();
    if (valid[g] && (out.best < 0 || out.error[g] < out.error[static_cast<std::size_t>(out.best)]))
      out.best = static_cast<int>(g);
  }
  if (out.best < 0) throw ConfigError("cross-validation: no usable penalty in the grid");
  return out;
}

}  // namespace

SelectorSpec SelectorSpec::Sis(int s) {
  SelectorSpec spec;
  spec.kind = Kind::sis;
  spec.size = s;
  return spec;
}

SelectorSpec SelectorSpec::Isis(int s, int steps) {
  SelectorSpec spec;
  spec.kind = Kind::isis;
  spec.size = s;
  spec.steps = steps;
  return spec;
}

SelectorSpec SelectorSpec::Stepwise(int s) {
  SelectorSpec spec;
  spec.kind = Kind::stepwise;
  spec.size = s;
  return spec;
}

SelectorSpec SelectorSpec::LassoCv(int folds, std::vector<double> grid) {
  SelectorSpec spec;
  spec.kind = Kind::lasso;
  spec.folds = folds;
  spec.lambda_grid = std::move(grid);
  return spec;
}

SelectorSpec SelectorSpec::ScadCv(int folds, double a, std::vector<double> grid) {
  SelectorSpec spec;
  spec.kind = Kind::scad;
  spec.folds = folds;
  spec.scad_a = a;
  spec.lambda_grid = std::move(grid);
  return spec;
}

void SelectorSpec::validate(const Dataset& data) const {
  switch (kind) {
    case Kind::sis:
      if (size < 0 || size > data.p()) throw ConfigError("sis: size must lie in [0, p]");
      break;
    case Kind::isis:
      if (size < 0 || size >= data.n()) throw ConfigError("isis: size must stay below n");
      if (steps < 1) throw ConfigError("isis: steps must be positive");
      break;
    case Kind::stepwise:
      if (size < 0 || size >= data.n()) throw ConfigError("stepwise: size must stay below n");
      break;
    case Kind::lasso:
    case Kind::scad:
      if (folds < 2 || folds > data.n())
        throw ConfigError("selector: cv folds must lie in [2, n]");
      if (kind == Kind::scad && !(scad_a > 2.0)) throw ConfigError("scad: a must exceed 2");
      for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0)) throw ConfigError("selector: lambda grid must be positive");
        if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1]))
          throw ConfigError("selector: lambda grid must be strictly decreasing");
      }
      break;
  }
}

std::string SelectorSpec::name() const {
  switch (kind) {
    case Kind::sis: return "sis";
    case Kind::isis: return "isis";
    case Kind::stepwise: return "stepwise";
    case Kind::lasso: return "lasso";
    case Kind::scad: return "scad";
  }
  return "sis";
}

Eigen::VectorXd LassoFit::fitted(const Eigen::MatrixXd& X) const {
  return (X * coefficients).array() + offset;
}

namespace {

// Marginal correlations with ranking metadata; constant columns flagged and
// pushed to the back of the order.
struct Ranking {
  Eigen::VectorXd corr;
  std::vector<unsigned char> constant;
  std::vector<int> order;
};

Ranking rank_by_correlation(const Dataset& data, const Eigen::VectorXd& target) {
  const int p = data.p();
  Ranking rk;
  rk.corr = Eigen::VectorXd::Zero(p);
  rk.constant.assign(static_cast<std::size_t>(p), 0);
  const double ty = target.mean();
  const Eigen::VectorXd tc = target.array() - ty;
  const double tnorm = tc.norm();
  const Eigen::VectorXd cross = data.X.transpose() * tc;  // centered target kills the mean term
  for (int j = 0; j < p; ++j) {
    const double m = data.X.col(j).mean();
    const double sq = (data.X.col(j).array() - m).matrix().squaredNorm();
    if (sq <= 1e-24 * std::max(1.0, data.X.col(j).squaredNorm()) || tnorm == 0.0) {
      rk.constant[static_cast<std::size_t>(j)] = 1;
      continue;
    }
    // cross(j) = x_j^T tc equals the centered cross product since 1^T tc = 0.
    rk.corr(j) = cross(j) / (std::sqrt(sq) * tnorm);
  }
  rk.order = all_columns(p);
  std::sort(rk.order.begin(), rk.order.end(), [&](int a, int b) {
    const bool ca = rk.constant[static_cast<std::size_t>(a)];
    const bool cb = rk.constant[static_cast<std::size_t>(b)];
    if (ca != cb) return cb;
    const double da = std::abs(rk.corr(a));
    const double db = std::abs(rk.corr(b));
    if (da != db) return da > db;
    return a < b;
  });
  return rk;
}

}  // namespace

IndexSet sis(const Dataset& data, int s) {
  if (s < 0 || s > data.p()) throw ConfigError("sis: size must lie in [0, p]");
  const Ranking rk = rank_by_correlation(data, data.y);
  std::vector<int> top(rk.order.begin(), rk.order.begin() + s);
  return IndexSet::from_unsorted(std::move(top)).unite(data.keep);
}

IndexSet stepwise_forward(const Dataset& data, int s, bool* reached_target) {
  if (s < 0 || s >= data.n()) throw ConfigError("stepwise: size must stay below n");
  const int n = data.n();
  const int p = data.p();
  Eigen::MatrixXd W = data.X;
  Eigen::VectorXd r = data.y;
  Eigen::VectorXd orig_sqn = W.colwise().squaredNorm();
  std::vector<unsigned char> in_model(static_cast<std::size_t>(p), 0);

  auto absorb = [&](int j) {
    const double norm = W.col(j).norm();
    Eigen::VectorXd q = W.col(j) / norm;
    r -= q * q.dot(r);
    W -= q * (q.transpose() * W);
    in_model[static_cast<std::size_t>(j)] = 1;
  };

  std::vector<int> chosen;
  for (int j : data.keep) {
    if (W.col(j).squaredNorm() > 1e-20 * std::max(orig_sqn(j), 1.0)) absorb(j);
    in_model[static_cast<std::size_t>(j)] = 1;
  }

  for (int step = 0; step < s; ++step) {
    int best = -1;
    double best_score = -1.0;
    for (int j = 0; j < p; ++j) {
      if (in_model[static_cast<std::size_t>(j)]) continue;
      const double wn2 = W.col(j).squaredNorm();
      if (wn2 <= 1e-20 * std::max(orig_sqn(j), 1.0)) continue;  // collinear with the model
      const double c = W.col(j).dot(r);
      const double score = c * c / wn2;  // exact rss reduction of adding j
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) {
      if (reached_target) *reached_target = false;
      chosen.insert(chosen.end(), data.keep.begin(), data.keep.end());
      return IndexSet::from_unsorted(std::move(chosen));
    }
    absorb(best);
    chosen.push_back(best);
  }
  if (reached_target) *reached_target = true;
  chosen.insert(chosen.end(), data.keep.begin(), data.keep.end());
  return IndexSet::from_unsorted(std::move(chosen));
}

IndexSet isis(const Dataset& data, int s, int steps, bool* reached_target) {
  // The refit model never exceeds s columns, so s < n is the binding
  // precondition.
  if (s < 0 || s >= data.n()) throw ConfigError("isis: size must stay below n");
  if (steps < 1) throw ConfigError("isis: steps must be positive");
  steps = std::min(steps, std::max(1, s));
  if (reached_target) *reached_target = true;

  IndexSet selected = data.keep;
  Eigen::VectorXd r = data.y;
  if (!data.keep.empty()) {
    OlsFit base = ols_fit(data, data.keep);
    r = data.y - base.fitted;
  }
  const double y_sqn = data.y.squaredNorm();
  const int base_size = s / steps;
  const int remainder = s % steps;
  for (int step = 0; step < steps; ++step) {
    const int batch = base_size + (step < remainder ? 1 : 0);
    if (batch == 0) continue;
    if (r.squaredNorm() <= 1e-20 * std::max(y_sqn, 1.0)) {
      if (reached_target) *reached_target = false;
      break;
    }
    const Ranking rk = rank_by_correlation(data, r);
    std::vector<int> add;
    for (int j : rk.order) {
      if (static_cast<int>(add.size()) == batch) break;
      if (!selected.contains(j)) add.push_back(j);
    }
    if (add.empty()) {
      if (reached_target) *reached_target = false;
      break;
    }
    selected = selected.unite(IndexSet::from_unsorted(std::move(add)));
    OlsFit fit;
    try {
      fit = ols_fit(data, selected);
    } catch (const SingularFitError&) {
      fit = ols_fit(data, selected, {.ridge = ridge_fallback_tau(data, selected)});
    }
    r = data.y - fit.fitted;
  }
  return selected;
}

double lambda_max(const Dataset& data) {
  WorkingDesign w = make_working(data);
  return lambda_max_working(w, keep_residual(data));
}

std::vector<double> default_lambda_grid(const Dataset& data) {
  return grid_from_lambda_max(lambda_max(data));
}

LassoFit lasso_fit(const Dataset& data, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lasso: lambda must be positive");
  WorkingDesign w = make_working(data);
  CdState st{Eigen::VectorXd::Zero(w.p), data.y, 0, true, false};
  cd_solve(w, lambda, Eigen::VectorXd::Ones(w.p), st, 0);
  return finalize_fit(data, w, st, lambda);
}

double scad_penalty_derivative(double t, double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 2.0)) throw ConfigError("scad: need lambda > 0 and a > 2");
  if (t <= lambda) return lambda;
  return std::max(a * lambda - t, 0.0) / (a - 1.0);
}

double scad_penalty(double t, double lambda, double a) {
  if (!(lambda > 0.0) || !(a > 2.0)) throw ConfigError("scad: need lambda > 0 and a > 2");
  if (t <= lambda) return lambda * t;
  if (t <= a * lambda)
    return (a * lambda * t - 0.5 * (t * t + lambda * lambda)) / (a - 1.0);
  return 0.5 * lambda * lambda * (a + 1.0);
}

LassoFit scad_lla(const Dataset& data, double lambda, double a) {
  if (!(lambda > 0.0)) throw ConfigError("scad: lambda must be positive");
  if (!(a > 2.0)) throw ConfigError("scad: a must exceed 2");
  WorkingDesign w = make_working(data);
  CdState st{Eigen::VectorXd::Zero(w.p), data.y, 0, true, false};
  cd_solve(w, lambda, Eigen::VectorXd::Ones(w.p), st, 0);  // lasso start
  lla_solve(w, lambda, a, st, 0);
  return finalize_fit(data, w, st, lambda);
}

double kkt_violation(const Dataset& data, const LassoFit& fit) {
  WorkingDesign w = make_working(data);
  const Eigen::VectorXd r = data.y - w.cols * fit.beta_std;
  double worst = 0.0;
  for (int j = 0; j < w.p; ++j) {
    if (!w.usable[static_cast<std::size_t>(j)]) continue;
    if (!w.penalized[static_cast<std::size_t>(j)]) {
      // Unpenalized gradient must vanish; measured as the coefficient move
      // a further update would make.
      worst = std::max(worst, std::abs(w.cols.col(j).dot(r)) / w.colnorm2(j));
      continue;
    }
    const double grad = std::abs(w.cols.col(j).dot(r)) / static_cast<double>(w.n);
    if (fit.beta_std(j) != 0.0)
      worst = std::max(worst, std::abs(grad - fit.lambda));
    else
      worst = std::max(worst, grad - fit.lambda);
  }
  return worst;
}

CvResult cross_validate_lambda(const Dataset& data, const SelectorSpec& spec, const Rng& rng) {
  if (spec.kind != SelectorSpec::Kind::lasso && spec.kind != SelectorSpec::Kind::scad)
    throw ConfigError("cross_validate_lambda: selector must be lasso or scad");
  spec.validate(data);
  const bool scad = spec.kind == SelectorSpec::Kind::scad;
  CvCurve curve = cv_curve(data, spec.folds, spec.lambda_grid, scad, spec.scad_a, rng);
  CvResult out;
  out.lambda = curve.grid[static_cast<std::size_t>(curve.best)];
  out.fit = scad ? scad_lla(data, out.lambda, spec.scad_a) : lasso_fit(data, out.lambda);
  out.curve.reserve(curve.grid.size());
  for (std::size_t g = 0; g < curve.grid.size(); ++g)
    out.curve.emplace_back(curve.grid[g], curve.error[g]);
  return out;
}

IndexSet select_model(const Dataset& data, const SelectorSpec& spec, const Rng& rng) {
  spec.validate(data);
  switch (spec.kind) {
    case SelectorSpec::Kind::sis:
      return sis(data, spec.size);
    case SelectorSpec::Kind::isis:
      return isis(data, spec.size, spec.steps);
    case SelectorSpec::Kind::stepwise:
      return stepwise_forward(data, spec.size);
    case SelectorSpec::Kind::lasso:
    case SelectorSpec::Kind::scad: {
      CvResult cv = cross_validate_lambda(data, spec, rng);
      return cv.fit.support.unite(data.keep);
    }
  }
  return data.keep;
}

IndexSet model_of_size(const Dataset& data, SelectorSpec::Kind family, int s, const Rng& rng) {
  (void)rng;  // the sweep paths are deterministic; kept for signature symmetry
  if (s < 0) throw ConfigError("model_of_size: size must be nonnegative");
  switch (family) {
    case SelectorSpec::Kind::sis: {
      const Ranking rk = rank_by_correlation(data, data.y);
      std::vector<int> top;
      for (int j : rk.order) {
        if (static_cast<int>(top.size()) == s) break;
        if (!data.keep.contains(j)) top.push_back(j);
      }
      return IndexSet::from_unsorted(std::move(top)).unite(data.keep);
    }
    case SelectorSpec::Kind::stepwise:
      return stepwise_forward(data, s);
    case SelectorSpec::Kind::isis:
      return isis(data, s);
    case SelectorSpec::Kind::lasso:
    case SelectorSpec::Kind::scad: {
      WorkingDesign w = make_working(data);
      const std::vector<double> grid = default_lambda_grid(data);
      const auto path = solve_path(w, data.y, grid, family == SelectorSpec::Kind::scad, 3.7,
                                   default_df_cap(data));
      const Eigen::VectorXd* best = nullptr;
      for (const auto& point : path) {
        if (!point.ok) break;
        best = &point.beta;
        int nonkeep = 0;
        for (int j = 0; j < w.p; ++j)
          if (point.beta(j) != 0.0 && !data.keep.contains(j)) ++nonkeep;
        if (nonkeep >= s) break;
      }
      if (!best) return data.keep;
      // Trim to the s largest standardized coefficients outside the keep-list.
      std::vector<std::pair<double, int>> mags;
      for (int j = 0; j < w.p; ++j)
        if ((*best)(j) != 0.0 && !data.keep.contains(j)) mags.emplace_back(-std::abs((*best)(j)), j);
      std::sort(mags.begin(), mags.end());
      std::vector<int> chosen;
      for (int k = 0; k < std::min<int>(s, static_cast<int>(mags.size())); ++k)
        chosen.push_back(mags[static_cast<std::size_t>(k)].second);
      return IndexSet::from_unsorted(std::move(chosen)).unite(data.keep);
    }
  }
  return data.keep;
}

}  // namespace rcvvar
