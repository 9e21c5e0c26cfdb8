#include "rcvvar/harness.hpp"

#include <algorithm>
#include <cmath>

#include "rcvvar/inference.hpp"
#include "rcvvar/parallel.hpp"
#include "rcvvar/stats.hpp"

namespace rcvvar {

namespace {

std::vector<std::string> split_tag(const std::string& tag) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : tag) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string family_name(SelectorSpec::Kind kind) {
  switch (kind) {
    case SelectorSpec::Kind::sis: return "sis";
    case SelectorSpec::Kind::isis: return "isis";
    case SelectorSpec::Kind::stepwise: return "stepwise";
    case SelectorSpec::Kind::lasso: return "lasso";
    case SelectorSpec::Kind::scad: return "scad";
  }
  return "sis";
}

SelectorSpec selector_for(const std::string& family, int size, int steps) {
  if (family == "sis") return SelectorSpec::Sis(size);
  if (family == "isis") return SelectorSpec::Isis(size, steps);
  if (family == "stepwise") return SelectorSpec::Stepwise(size);
  if (family == "lasso") return SelectorSpec::LassoCv();
  if (family == "scad") return SelectorSpec::ScadCv();
  throw ConfigError("unknown selector family: " + family);
}

}  // namespace

MethodSpec MethodSpec::parse(const std::string& tag, int default_size) {
  const std::vector<std::string> parts = split_tag(tag);
  const std::string& base = parts[0];
  const int arg1 = parts.size() > 1 ? std::stoi(parts[1]) : -1;
  const int arg2 = parts.size() > 2 ? std::stoi(parts[2]) : -1;
  const int size = arg1 >= 0 ? arg1 : default_size;
  const int steps = arg2 >= 1 ? arg2 : 2;

  MethodSpec m;
  m.tag = base;
  if (base == "oracle") {
    m.estimator = Estimator::oracle;
    return m;
  }
  auto with_family = [&](Estimator est, const std::string& prefix, const std::string& canonical) {
    m.estimator = est;
    m.selector = selector_for(base.substr(prefix.size()), size, steps);
    m.tag = canonical + m.selector.name();
    return m;
  };
  if (base.starts_with("naive-")) return with_family(Estimator::naive, "naive-", "naive-");
  if (base.starts_with("n-")) return with_family(Estimator::naive, "n-", "naive-");
  if (base.starts_with("rrcv-")) return with_family(Estimator::repeated_rcv, "rrcv-", "rrcv-");
  if (base.starts_with("wrcv-")) return with_family(Estimator::wrcv, "wrcv-", "wrcv-");
  if (base.starts_with("rcv-")) return with_family(Estimator::rcv, "rcv-", "rcv-");
  if (base == "plugin-lasso" || base == "p-lasso") {
    m.estimator = Estimator::plugin_lasso;
    m.selector = SelectorSpec::LassoCv();
    m.tag = "plugin-lasso";
    return m;
  }
  if (base == "plugin-scad" || base == "p-scad") {
    m.estimator = Estimator::plugin_scad;
    m.selector = SelectorSpec::ScadCv();
    m.tag = "plugin-scad";
    return m;
  }
  if (base == "cv-lasso" || base == "cv-scad") {
    m.estimator = base == "cv-lasso" ? Estimator::cv_lasso : Estimator::cv_scad;
    m.selector = base == "cv-lasso" ? SelectorSpec::LassoCv() : SelectorSpec::ScadCv();
    if (arg1 >= 2) m.cv_folds = arg1;  // the suffix sets K here
    return m;
  }
  throw ConfigError("unknown method tag: " + tag);
}

std::map<int, double> ExperimentConfig::scaled_beta() const {
  std::map<int, double> out;
  for (const auto& [j, coef] : beta) {
    const double v = coef * b;
    if (v != 0.0) out[j] = v;
  }
  return out;
}

IndexSet ExperimentConfig::true_support() const {
  std::vector<int> idx;
  for (const auto& [j, coef] : scaled_beta()) idx.push_back(j);
  return IndexSet::from_unsorted(std::move(idx));
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "example1") {
    cfg.n = 200;
    cfg.p = 1000;
    cfg.cov = CovarianceSpec::identity();
    return cfg;
  }
  if (name == "example2") {
    cfg.n = 200;
    cfg.p = 2000;
    cfg.beta = {{0, 1.0}, {1, 1.0}, {2, 1.0}};
    cfg.cov = CovarianceSpec::equicorrelated(0.0);
    return cfg;
  }
  if (name == "example3") {
    cfg.n = 400;
    cfg.p = 1000;
    cfg.beta = {{1, 1.01},  {2, -0.06}, {3, 0.72},  {5, 1.55},  {7, 2.32},
                {11, -0.36}, {13, 3.75}, {17, -2.04}, {19, -0.13}, {23, 0.61}};
    cfg.cov = CovarianceSpec::ar1(0.5);
    return cfg;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<MethodSpec> default_methods(const ExperimentConfig& config) {
  std::vector<MethodSpec> out;
  if (config.beta.empty()) {
    // Null model: predetermined size 5.
    for (const char* tag : {"oracle", "naive-sis", "rcv-sis", "naive-lasso", "rcv-lasso"})
      out.push_back(MethodSpec::parse(tag, 5));
    return out;
  }
  const int s = std::max(1, config.n / 4);
  for (const char* tag : {"oracle", "naive-sis", "naive-isis", "naive-lasso", "rcv-sis",
                          "rcv-isis", "rcv-lasso", "plugin-scad", "cv-scad", "plugin-lasso",
                          "cv-lasso"})
    out.push_back(MethodSpec::parse(tag, s));
  // ISIS recruits in several residual-guided rounds.
  for (auto& m : out)
    if (m.selector.kind == SelectorSpec::Kind::isis) m.selector.steps = 5;
  return out;
}

namespace {

struct Truth {
  std::map<int, double> beta;
  IndexSet support;
  double sigma2 = 1.0;
};

void fill_split_diagnostics(const ExperimentConfig& config, const Dataset& data,
                            const VarianceReport& report, const Eigen::VectorXd& eps,
                            const Truth& truth, ReplicationRecord& rec) {
  const IndexSet& m1 = report.models[0];
  const IndexSet& m2 = report.models[1];
  rec.size_first = m1.size();
  rec.size_second = m2.size();
  rec.size_union = m1.unite(m2).size();
  rec.screened_first = m1.contains_all(truth.support);
  rec.screened_second = m2.contains_all(truth.support);
  rec.screened = rec.screened_first && rec.screened_second;
  const Dataset first = data.rows(report.split->first);
  const Dataset second = data.rows(report.split->second);
  Eigen::VectorXd eps1(first.n()), eps2(second.n());
  for (int i = 0; i < first.n(); ++i) eps1(i) = eps(report.split->first[static_cast<std::size_t>(i)]);
  for (int i = 0; i < second.n(); ++i)
    eps2(i) = eps(report.split->second[static_cast<std::size_t>(i)]);
  // gamma and VMV are averaged over the two refit halves.
  const double g1 = gamma_hat(second, m1, eps2);
  const double g2 = gamma_hat(first, m2, eps1);
  rec.gamma = 0.5 * (g1 + g2);
  const double v1 = vmv(truth.beta, config.cov, truth.sigma2, truth.support.difference(m1));
  const double v2 = vmv(truth.beta, config.cov, truth.sigma2, truth.support.difference(m2));
  rec.vmv = 0.5 * (v1 + v2);
}

void fill_single_model_diagnostics(const ExperimentConfig& config, const Dataset& data,
                                   const IndexSet& model, const Eigen::VectorXd& eps,
                                   const Truth& truth, ReplicationRecord& rec) {
  rec.size_first = model.size();
  rec.size_union = model.size();
  rec.screened = model.contains_all(truth.support);
  rec.screened_first = rec.screened;
  rec.gamma = gamma_hat(data, model, eps);
  rec.vmv = vmv(truth.beta, config.cov, truth.sigma2, truth.support.difference(model));
}

ReplicationRecord run_method(const ExperimentConfig& config, const Dataset& data,
                             const MethodSpec& method, const Rng& rng, const Eigen::VectorXd& eps,
                             const Truth& truth, int rep, int method_index) {
  ReplicationRecord rec;
  rec.rep = rep;
  rec.method = method_index;
  rec.sub_seed = rng.seed();
  try {
    VarianceReport report;
    switch (method.estimator) {
      case MethodSpec::Estimator::oracle:
        report = oracle_variance(data, truth.beta);
        rec.screened = true;
        rec.screened_first = true;
        rec.screened_second = true;
        break;
      case MethodSpec::Estimator::naive:
        report = naive_two_stage(data, method.selector, rng);
        fill_single_model_diagnostics(config, data, report.models[0], eps, truth, rec);
        break;
      case MethodSpec::Estimator::rcv:
      case MethodSpec::Estimator::wrcv:
        report = rcv(data, method.selector, rng, method.estimator == MethodSpec::Estimator::wrcv);
        fill_split_diagnostics(config, data, report, eps, truth, rec);
        break;
      case MethodSpec::Estimator::repeated_rcv: {
        RepeatedRcv rr = repeated_rcv(data, method.selector, method.repeats, rng);
        report = rr.report;
        if (report.split) fill_split_diagnostics(config, data, report, eps, truth, rec);
        break;
      }
      case MethodSpec::Estimator::plugin_lasso:
        report = plugin_lasso_variance(data, method.selector, rng);
        fill_single_model_diagnostics(config, data, report.models[0], eps, truth, rec);
        break;
      case MethodSpec::Estimator::plugin_scad:
        report = plugin_scad_variance(data, method.selector, rng);
        fill_single_model_diagnostics(config, data, report.models[0], eps, truth, rec);
        break;
      case MethodSpec::Estimator::cv_lasso:
        report = cv_lasso_variance(data, method.cv_folds, method.selector.lambda_grid, rng);
        fill_single_model_diagnostics(config, data, report.models[0], eps, truth, rec);
        break;
      case MethodSpec::Estimator::cv_scad:
        report = cv_scad_variance(data, method.cv_folds, method.selector.lambda_grid,
                                  method.selector.scad_a, rng);
        fill_single_model_diagnostics(config, data, report.models[0], eps, truth, rec);
        break;
    }
    rec.ok = true;
    rec.sigma2 = report.sigma2;
    rec.df = report.df;
    rec.ridge_fallback = report.ridge_fallback_used;
    rec.converged = report.converged;
  } catch (const std::exception& err) {
    rec.ok = false;
    rec.error = err.what();
  }
  return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw ConfigError("run_experiment: reps must be positive");
  if (config.methods.empty()) throw ConfigError("run_experiment: no methods configured");
  for (const auto& [j, coef] : config.beta)
    if (j < 0 || j >= config.p) throw ConfigError("run_experiment: beta index out of range");
  config.cov.validate(config.p);

  Truth truth;
  truth.beta = config.scaled_beta();
  truth.support = config.true_support();
  truth.sigma2 = config.sigma * config.sigma;

  const int n_methods = static_cast<int>(config.methods.size());
  ExperimentResult result;
  result.config = config;
  result.records.resize(static_cast<std::size_t>(config.reps) * n_methods);

  const int threads = config.parallelism > 0 ? config.parallelism : default_parallelism();
  parallel_for(config.reps, threads, [&](int rep) {
    Rng base(mix_seed(config.seed, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd X = generate_design(config.n, config.p, config.cov, base.child(streams::design));
    Eigen::VectorXd eps;
    Eigen::VectorXd y =
        simulate_response(X, truth.beta, config.sigma, base.child(streams::noise), &eps);
    const Dataset data(std::move(X), std::move(y));
    for (int mi = 0; mi < n_methods; ++mi) {
      result.records[static_cast<std::size_t>(rep) * n_methods + mi] =
          run_method(config, data, config.methods[static_cast<std::size_t>(mi)],
                     base.child(streams::method_base + static_cast<std::uint64_t>(mi)), eps, truth,
                     rep, mi);
    }
  });

  result.metrics = aggregate(config, result.records);
  return result;
}

std::vector<MetricsRow> aggregate(const ExperimentConfig& config,
                                  const std::vector<ReplicationRecord>& records) {
  const int n_methods = static_cast<int>(config.methods.size());
  const double sigma2 = config.sigma * config.sigma;
  std::vector<MetricsRow> rows(static_cast<std::size_t>(n_methods));
  for (int mi = 0; mi < n_methods; ++mi) {
    std::vector<double> values, sizes, vmvs, screened;
    int fallback = 0;
    // Records visited in replication order: aggregates are independent of
    // scheduling.
    for (int rep = 0; rep < config.reps; ++rep) {
      const auto& rec = records[static_cast<std::size_t>(rep) * n_methods + mi];
      if (!rec.ok) continue;
      values.push_back(rec.sigma2);
      sizes.push_back(rec.size_second >= 0 ? 0.5 * (rec.size_first + rec.size_second)
                                           : rec.size_first);
      vmvs.push_back(rec.vmv);
      screened.push_back(rec.screened ? 1.0 : 0.0);
      if (rec.ridge_fallback) ++fallback;
    }
    MetricsRow& row = rows[static_cast<std::size_t>(mi)];
    row.method = config.methods[static_cast<std::size_t>(mi)].tag;
    row.reps_used = static_cast<int>(values.size());
    row.fallback_count = fallback;
    if (!values.empty()) {
      row.bias = mean(values) - sigma2;
      row.se = values.size() > 1 ? sample_sd(values) : 0.0;
      row.ams = mean(sizes);
      row.ssp = mean(screened);
      row.vmv = mean(vmvs);
    }
  }
  return rows;
}

std::vector<SweepRow> sweep_model_size(const ExperimentConfig& config,
                                       SelectorSpec::Kind family,
                                       const std::vector<int>& sizes) {
  if (config.reps < 1) throw ConfigError("sweep_model_size: reps must be positive");
  for (int s : sizes) {
    if (s < 0) throw ConfigError("sweep_model_size: sizes must be nonnegative");
    if (s >= config.n / 2)
      throw ConfigError("sweep_model_size: size must stay below n/2 for the rcv entries");
  }
  Truth truth;
  truth.beta = config.scaled_beta();
  truth.sigma2 = config.sigma * config.sigma;

  const int n_sizes = static_cast<int>(sizes.size());
  std::vector<double> naive_values(static_cast<std::size_t>(config.reps) * n_sizes);
  std::vector<double> rcv_values(static_cast<std::size_t>(config.reps) * n_sizes);

  const int threads = config.parallelism > 0 ? config.parallelism : default_parallelism();
  parallel_for(config.reps, threads, [&](int rep) {
    Rng base(mix_seed(config.seed, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd X = generate_design(config.n, config.p, config.cov, base.child(streams::design));
    Eigen::VectorXd y =
        simulate_response(X, truth.beta, config.sigma, base.child(streams::noise));
    const Dataset data(std::move(X), std::move(y));
    const SplitPlan plan = split_even(data.n(), base.child(streams::split));
    const Dataset first = data.rows(plan.first);
    const Dataset second = data.rows(plan.second);
    const Rng sel = base.child(streams::select_first);
    for (int si = 0; si < n_sizes; ++si) {
      const int s = sizes[static_cast<std::size_t>(si)];
      const IndexSet full_model = model_of_size(data, family, s, sel);
      const OlsFit full_fit = ols_fit(data, full_model);
      naive_values[static_cast<std::size_t>(rep) * n_sizes + si] =
          full_fit.rss / (data.n() - full_model.size());

      const IndexSet m1 = model_of_size(first, family, s, sel);
      const IndexSet m2 = model_of_size(second, family, s, sel);
      const OlsFit f1 = ols_fit(second, m1);
      const OlsFit f2 = ols_fit(first, m2);
      const double s1 = f1.rss / (second.n() - m1.size());
      const double s2 = f2.rss / (first.n() - m2.size());
      rcv_values[static_cast<std::size_t>(rep) * n_sizes + si] = 0.5 * (s1 + s2);
    }
  });

  std::vector<SweepRow> rows;
  for (int si = 0; si < n_sizes; ++si) {
    std::vector<double> nv(static_cast<std::size_t>(config.reps));
    std::vector<double> rv(static_cast<std::size_t>(config.reps));
    for (int rep = 0; rep < config.reps; ++rep) {
      nv[static_cast<std::size_t>(rep)] = naive_values[static_cast<std::size_t>(rep) * n_sizes + si];
      rv[static_cast<std::size_t>(rep)] = rcv_values[static_cast<std::size_t>(rep) * n_sizes + si];
    }
    rows.push_back({"naive-" + family_name(family), sizes[static_cast<std::size_t>(si)], median(nv)});
    rows.push_back({"rcv-" + family_name(family), sizes[static_cast<std::size_t>(si)], median(rv)});
  }
  return rows;
}

std::vector<FitSweepRow> fit_size_sweep(const Dataset& data, SelectorSpec::Kind family,
                                        const std::vector<int>& sizes, std::uint64_t seed) {
  // Model size counts non-constant predictors (kept ones included); the
  // intercept column rides along without being counted.
  int kept_predictors = 0;
  for (int j : data.keep) {
    const double m = data.X.col(j).mean();
    if ((data.X.col(j).array() - m).matrix().squaredNorm() >
        1e-24 * std::max(1.0, data.X.col(j).squaredNorm()))
      ++kept_predictors;
  }
  Rng base(seed);
  const SplitPlan plan = split_even(data.n(), base.child(streams::split));
  const Dataset first = data.rows(plan.first);
  const Dataset second = data.rows(plan.second);
  const Rng sel = base.child(streams::select_first);

  std::vector<FitSweepRow> rows;
  for (int s : sizes) {
    const int budget = s - kept_predictors;
    if (budget < 0)
      throw ConfigError("fit_size_sweep: size smaller than the kept predictor count");
    if (budget + data.keep.size() >= data.n() / 2)
      throw ConfigError("fit_size_sweep: size too large to refit on a half");
    FitSweepRow row;
    row.size = s;

    const IndexSet full_model = model_of_size(data, family, budget, sel);
    const OlsFit full_fit = ols_fit(data, full_model);
    row.naive_sd = std::sqrt(full_fit.rss / (data.n() - full_model.size()));
    row.r2 = r_squared(data.y, full_fit.fitted);

    const IndexSet m1 = model_of_size(first, family, budget, sel);
    const IndexSet m2 = model_of_size(second, family, budget, sel);
    const OlsFit f1 = ols_fit(second, m1);
    const OlsFit f2 = ols_fit(first, m2);
    const double s1 = f1.rss / (second.n() - m1.size());
    const double s2 = f2.rss / (first.n() - m2.size());
    row.rcv_sd = std::sqrt(0.5 * (s1 + s2));
    rows.push_back(row);
  }
  return rows;
}

LimitLawReport limit_law_check(const std::string& method_tag, const ExperimentConfig& config,
                               int reps) {
  ExperimentConfig cfg = config;
  cfg.reps = reps;
  const int default_size = cfg.beta.empty() ? 5 : std::max(1, cfg.n / 4);
  cfg.methods = {MethodSpec::parse(method_tag, default_size)};
  const ExperimentResult result = run_experiment(cfg);
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(reps));
  for (const auto& rec : result.records)
    if (rec.ok) draws.push_back(rec.sigma2);
  const double sigma2 = cfg.sigma * cfg.sigma;
  const double fourth = 3.0 * sigma2 * sigma2;  // Gaussian noise
  const bool expect = !method_tag.starts_with("naive") && !method_tag.starts_with("n-");
  return limit_law_from_draws(method_tag, draws, cfg.n, sigma2, fourth, 0.01, expect);
}

}  // namespace rcvvar
