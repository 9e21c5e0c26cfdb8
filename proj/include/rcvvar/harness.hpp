#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcvvar/core.hpp"
#include "rcvvar/estimators.hpp"
#include "rcvvar/theory.hpp"

namespace rcvvar {

// One variance-estimation method in an experiment: an estimator plus the
// selector feeding it where one applies.
struct MethodSpec {
  enum class Estimator {
    oracle,
    naive,
    rcv,
    wrcv,
    repeated_rcv,
    plugin_lasso,
    cv_lasso,
    plugin_scad,
    cv_scad,
  };

  std::string tag;  // CSV/report name, e.g. "rcv-sis"
  Estimator estimator = Estimator::oracle;
  SelectorSpec selector;  // used by naive/rcv/wrcv/repeated_rcv
  int repeats = 20;       // repeated_rcv splits
  int cv_folds = 10;      // K for the cv_* variance estimators

  // Parses "oracle", "naive-sis", "rcv-lasso", "wrcv-sis", "rrcv-sis",
  // "plugin-lasso", "cv-lasso", "plugin-scad", "cv-scad", ...  Selector
  // sizes accept a ":s" suffix ("rcv-sis:50", "naive-isis:50:5" for
  // size 50 in 5 batches); default_size applies otherwise.
  static MethodSpec parse(const std::string& tag, int default_size);
};

// A simulation design: everything needed to regenerate each replication.
struct ExperimentConfig {
  std::string name = "custom";
  int n = 200;
  int p = 1000;
  std::map<int, double> beta;  // sparse truth before the b multiplier
  double b = 1.0;
  CovarianceSpec cov;
  double sigma = 1.0;
  std::vector<MethodSpec> methods;
  int reps = 100;
  std::uint64_t seed = 1;
  int parallelism = 0;  // 0 means default_parallelism()

  std::map<int, double> scaled_beta() const;  // beta * b
  IndexSet true_support() const;              // nonzero entries of scaled beta
};

// Per-replication, per-method record; carries the sub-seed so any
// replication can be replayed in isolation.
struct ReplicationRecord {
  int rep = 0;
  int method = 0;  // index into config.methods
  std::uint64_t sub_seed = 0;
  bool ok = false;
  std::string error;
  double sigma2 = 0.0;
  int df = 0;
  int size_first = 0;       // |M|, or |M1| for the split estimators
  int size_second = -1;     // |M2|, -1 when there is no second model
  int size_union = 0;
  double gamma = 0.0;
  bool screened = false;        // union convention (both halves for rcv)
  bool screened_first = false;  // per-half screening flags
  bool screened_second = false;
  double vmv = 0.0;
  bool ridge_fallback = false;
  bool converged = true;
};

// Aggregated metrics for one method.
struct MetricsRow {
  std::string method;
  double bias = 0.0;  // mean sigma2_hat - sigma^2
  double se = 0.0;    // sample SD of sigma2_hat across replications
  double ams = 0.0;   // average model size (half average for the split estimators)
  double ssp = 0.0;   // sure screening probability (both halves for rcv)
  double vmv = 0.0;   // mean variance of missing variables
  int reps_used = 0;
  int fallback_count = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;  // reps x methods, replication-major
  std::vector<MetricsRow> metrics;
};

// Runs every configured method on every replication.  Replications run in
// parallel (config.parallelism workers; 1 is the serial reference path) and
// each derives its own generator from (seed, rep), so results are
// bit-identical for any worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Aggregation of raw records into metric rows (fixed replication order,
// compensated summation).
std::vector<MetricsRow> aggregate(const ExperimentConfig& config,
                                  const std::vector<ReplicationRecord>& records);

// Built-in presets: "example1" (null model), "example2" (three unit
// coefficients, equicorrelated design), "example3" (ten coefficients on an
// AR(1) design).  b / rho / n / p are adjustable afterwards.
ExperimentConfig preset(const std::string& name);

// Default per-method list for a preset, following the convention of
// predetermined size 5 in the null model and n/4 in the sparse models.
std::vector<MethodSpec> default_methods(const ExperimentConfig& config);

// Median sigma2_hat per (method, model size) for naive vs rcv built on one
// selector family.
struct SweepRow {
  std::string method;
  int size = 0;
  double median_sigma2 = 0.0;
};

std::vector<SweepRow> sweep_model_size(const ExperimentConfig& config,
                                       SelectorSpec::Kind family,
                                       const std::vector<int>& sizes);

// CSV ingestion for real-data mode: header row, numeric columns, rows with
// missing cells dropped (counted), keep columns resolved by name, intercept
// column appended and kept.
struct IngestResult {
  Dataset data;
  int rows_dropped = 0;
  int response_column = 0;  // position in the original file
  std::string response_name;
};

IngestResult ingest_csv(const std::string& path, const std::string& response,
                        const std::vector<std::string>& keep_names);

// Real-data model-size sweep: per size, naive and RCV residual standard
// deviation plus variance explained by the naive fit.
struct FitSweepRow {
  int size = 0;
  double naive_sd = 0.0;
  double rcv_sd = 0.0;
  double r2 = 0.0;
};

std::vector<FitSweepRow> fit_size_sweep(const Dataset& data, SelectorSpec::Kind family,
                                        const std::vector<int>& sizes, std::uint64_t seed);

// Emission.  CSV holds one MetricsRow per line (floats at 6 significant
// digits); the values file is (method, value) long format for density
// plots; JSON carries the config and full per-replication records for
// exact replay.
void emit_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);
std::string metrics_csv_string(const std::vector<MetricsRow>& rows);
void emit_values_csv(const ExperimentResult& result, const std::string& path);
void emit_raw_json(const ExperimentResult& result, const std::string& path);
ExperimentResult load_raw_json(const std::string& path);

void emit_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
void emit_fit_sweep_csv(const std::vector<FitSweepRow>& rows, const std::string& path);

// Limit-law check for one method tag of a config (Monte Carlo over fresh
// replications; Gaussian noise fourth moment).
LimitLawReport limit_law_check(const std::string& method_tag, const ExperimentConfig& config,
                               int reps);

}  // namespace rcvvar
