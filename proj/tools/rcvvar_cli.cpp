// Command-line front end: simulation presets, model-size sweeps, theory
// checks, and the real-data CSV mode.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcvvar/harness.hpp"
#include "rcvvar/parallel.hpp"
#include "rcvvar/stats.hpp"

namespace {

using namespace rcvvar;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : csv) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> split_ints(const std::string& csv) {
  std::vector<int> out;
  for (const std::string& tok : split_list(csv)) out.push_back(std::stoi(tok));
  return out;
}

struct SimulateArgs {
  std::string preset_name = "example1";
  int n = 0, p = 0;
  double b = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  int reps = 0;
  std::uint64_t seed = 1;
  std::string methods;
  int parallelism = 0;
  std::string out, json_out, values_out;
};

ExperimentConfig build_config(const SimulateArgs& a) {
  ExperimentConfig cfg = preset(a.preset_name);
  if (a.n > 0) cfg.n = a.n;
  if (a.p > 0) cfg.p = a.p;
  if (!std::isnan(a.b)) cfg.b = a.b;
  if (!std::isnan(a.rho)) {
    if (cfg.cov.kind == CovarianceSpec::Kind::identity && a.rho != 0.0)
      cfg.cov = CovarianceSpec::equicorrelated(a.rho);
    else
      cfg.cov.rho = a.rho;
  }
  if (!std::isnan(a.sigma)) cfg.sigma = a.sigma;
  if (a.reps > 0) cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.parallelism = a.parallelism;
  if (!a.methods.empty()) {
    const int default_size = cfg.beta.empty() ? 5 : std::max(1, cfg.n / 4);
    for (const std::string& tag : split_list(a.methods))
      cfg.methods.push_back(MethodSpec::parse(tag, default_size));
  } else {
    cfg.methods = default_methods(cfg);
  }
  return cfg;
}

int run_simulate(const SimulateArgs& a) {
  const ExperimentConfig cfg = build_config(a);
  const ExperimentResult result = run_experiment(cfg);
  const std::string csv = metrics_csv_string(result.metrics);
  if (a.out.empty())
    std::cout << csv;
  else
    emit_metrics_csv(result.metrics, a.out);
  if (!a.json_out.empty()) emit_raw_json(result, a.json_out);
  if (!a.values_out.empty()) emit_values_csv(result, a.values_out);
  return 0;
}

SelectorSpec::Kind family_of(const std::string& method_tag) {
  const std::size_t dash = method_tag.rfind('-');
  const std::string family = dash == std::string::npos ? method_tag : method_tag.substr(dash + 1);
  if (family == "sis") return SelectorSpec::Kind::sis;
  if (family == "isis") return SelectorSpec::Kind::isis;
  if (family == "stepwise") return SelectorSpec::Kind::stepwise;
  if (family == "lasso") return SelectorSpec::Kind::lasso;
  if (family == "scad") return SelectorSpec::Kind::scad;
  throw ConfigError("cannot derive a selector family from: " + method_tag);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual-variance estimation for ultrahigh dimensional sparse regression"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation preset and emit metrics");
  simulate->add_option("--preset", sim.preset_name, "example1 | example2 | example3");
  simulate->add_option("--n", sim.n, "Sample size override");
  simulate->add_option("--p", sim.p, "Dimension override");
  simulate->add_option("--b", sim.b, "Signal multiplier");
  simulate->add_option("--rho", sim.rho, "Design correlation parameter");
  simulate->add_option("--sigma", sim.sigma, "Noise standard deviation");
  simulate->add_option("--reps", sim.reps, "Replications");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--methods", sim.methods,
                       "Comma list of method tags (default: preset methods)");
  simulate->add_option("--parallelism", sim.parallelism,
                       "Worker count (0 = RCVVAR_THREADS or hardware)");
  simulate->add_option("--out", sim.out, "Metrics CSV path (default: stdout)");
  simulate->add_option("--json", sim.json_out, "Raw per-replication JSON path");
  simulate->add_option("--values", sim.values_out, "Long-format (method,value) CSV path");

  SimulateArgs swp;
  std::string sweep_methods = "naive-sis,rcv-sis";
  std::string sweep_sizes = "1,2,5,10";
  auto* sweep = app.add_subcommand("sweep", "Median estimate as a function of model size");
  sweep->add_option("--preset", swp.preset_name, "example1 | example2 | example3");
  sweep->add_option("--n", swp.n, "Sample size override");
  sweep->add_option("--p", swp.p, "Dimension override");
  sweep->add_option("--b", swp.b, "Signal multiplier");
  sweep->add_option("--rho", swp.rho, "Design correlation parameter");
  sweep->add_option("--reps", swp.reps, "Replications");
  sweep->add_option("--seed", swp.seed, "Master seed");
  sweep->add_option("--methods", sweep_methods, "naive-<family>,rcv-<family>");
  sweep->add_option("--sizes", sweep_sizes, "Comma list of model sizes");
  sweep->add_option("--parallelism", swp.parallelism, "Worker count");
  sweep->add_option("--out", swp.out, "Output CSV path (default: stdout)");

  int th_n = 50, th_p = 1000, th_reps = 500;
  std::uint64_t th_seed = 1;
  double th_c = std::numeric_limits<double>::quiet_NaN();
  std::string th_out;
  int th_threads = 0;
  auto* theory = app.add_subcommand("theory", "Asymptotic-theory checks");
  theory->require_subcommand(1);
  auto* gumbel = theory->add_subcommand("gumbel", "Spurious-correlation extremes under the null");
  gumbel->add_option("--n", th_n, "Sample size");
  gumbel->add_option("--p", th_p, "Dimension");
  gumbel->add_option("--reps", th_reps, "Replications");
  gumbel->add_option("--seed", th_seed, "Master seed");
  gumbel->add_option("--c", th_c, "Also run the tail bound check at this c");
  gumbel->add_option("--parallelism", th_threads, "Worker count");
  gumbel->add_option("--out", th_out, "Write the gamma draws as (method,value) CSV");

  int qf_m = 3, qf_reps = 10000;
  std::uint64_t qf_seed = 1;
  std::string qf_kind = "random";
  double qf_sigma = 1.0;
  auto* quadform = theory->add_subcommand("quadform", "Quadratic-form moment identities");
  quadform->add_option("--m", qf_m, "Matrix dimension");
  quadform->add_option("--reps", qf_reps, "Monte Carlo draws");
  quadform->add_option("--seed", qf_seed, "Master seed");
  quadform->add_option("--kind", qf_kind, "identity | projection | random");
  quadform->add_option("--sigma", qf_sigma, "Noise scale");

  std::string fit_data, fit_response, fit_keep, fit_method = "rcv-scad", fit_sizes, fit_out;
  std::uint64_t fit_seed = 1;
  auto* fit = app.add_subcommand("fit", "Real-data model-size sweep from a CSV file");
  fit->add_option("--data", fit_data, "CSV path")->required();
  fit->add_option("--response", fit_response, "Response column name")->required();
  fit->add_option("--keep", fit_keep, "Comma list of always-kept columns");
  fit->add_option("--method", fit_method, "rcv-<family>, family drives the selection");
  fit->add_option("--sweep-sizes", fit_sizes, "Comma list of model sizes")->required();
  fit->add_option("--seed", fit_seed, "Split seed");
  fit->add_option("--out", fit_out, "Output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim);

    if (sweep->parsed()) {
      SimulateArgs a = swp;
      a.methods.clear();
      ExperimentConfig cfg = build_config(a);
      if (swp.reps <= 0) cfg.reps = 500;
      const std::vector<std::string> wanted = split_list(sweep_methods);
      const SelectorSpec::Kind family = family_of(wanted.at(0));
      for (const std::string& tag : wanted)
        if (family_of(tag) != family)
          throw ConfigError("sweep methods must share one selector family");
      auto rows = sweep_model_size(cfg, family, split_ints(sweep_sizes));
      std::erase_if(rows, [&](const SweepRow& r) {
        return std::find(wanted.begin(), wanted.end(), r.method) == wanted.end();
      });
      if (swp.out.empty()) {
        std::cout << "method,size,median_sigma2\n";
        for (const auto& r : rows)
          std::printf("%s,%d,%.6g\n", r.method.c_str(), r.size, r.median_sigma2);
      } else {
        emit_sweep_csv(rows, swp.out);
      }
      return 0;
    }

    if (gumbel->parsed()) {
      const int threads = th_threads > 0 ? th_threads : default_parallelism();
      const ExtremeCorrSummary summary = sample_gamma_null(th_n, th_p, th_reps, th_seed, threads);
      std::printf("n,p,reps,sample_median,predicted_median,d_2p,predicted_scale\n");
      std::printf("%d,%d,%d,%.6g,%.6g,%.6g,%.6g\n", summary.n, summary.p, th_reps,
                  summary.sample_median, summary.predicted_median, summary.d_2p,
                  summary.predicted_scale);
      if (!std::isnan(th_c)) {
        const TailBoundCheck tb = tail_bound_check(th_n, th_p, th_c, th_reps, th_seed, threads);
        std::printf("tail_c,threshold,empirical,bound,margin,pass\n");
        std::printf("%.6g,%.6g,%.6g,%.6g,%.6g,%d\n", th_c, tb.threshold, tb.empirical, tb.bound,
                    tb.margin, tb.pass ? 1 : 0);
      }
      if (!th_out.empty()) {
        std::ostringstream out;
        out << "method,value\n";
        for (double g : summary.samples) out << "gamma_n," << g << '\n';
        std::ofstream f(th_out, std::ios::binary);
        if (!f) throw IoError("cannot open for writing: " + th_out);
        f << out.str();
      }
      return 0;
    }

    if (quadform->parsed()) {
      Eigen::MatrixXd P;
      if (qf_kind == "identity") {
        P = Eigen::MatrixXd::Identity(qf_m, qf_m);
      } else if (qf_kind == "projection") {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(qf_m);
        P = v * v.transpose() / static_cast<double>(qf_m);
      } else if (qf_kind == "random") {
        Rng r(mix_seed(qf_seed, 97));
        Eigen::MatrixXd A(qf_m, qf_m);
        for (int i = 0; i < qf_m; ++i)
          for (int j = 0; j < qf_m; ++j) A(i, j) = r.normal();
        P = 0.5 * (A + A.transpose());
      } else {
        throw ConfigError("unknown quadform kind: " + qf_kind);
      }
      NoiseSpec noise;
      noise.scale = qf_sigma;
      const QuadFormMoments m = quadratic_form_moments(P, noise, qf_reps, Rng(qf_seed));
      std::printf("mean_emp,var_emp,mean_theory,var_exact,var_bound\n");
      std::printf("%.6g,%.6g,%.6g,%.6g,%.6g\n", m.mean_emp, m.var_emp, m.mean_theory, m.var_exact,
                  m.var_bound);
      return 0;
    }

    if (fit->parsed()) {
      const IngestResult ingest = ingest_csv(fit_data, fit_response, split_list(fit_keep));
      if (ingest.rows_dropped > 0)
        std::fprintf(stderr, "warning: dropped %d rows with missing cells\n",
                     ingest.rows_dropped);
      const auto rows =
          fit_size_sweep(ingest.data, family_of(fit_method), split_ints(fit_sizes), fit_seed);
      if (fit_out.empty()) {
        std::cout << "size,naive_sd,rcv_sd,r_squared\n";
        for (const auto& r : rows)
          std::printf("%d,%.6g,%.6g,%.6g\n", r.size, r.naive_sd, r.rcv_sd, r.r2);
      } else {
        emit_fit_sweep_csv(rows, fit_out);
      }
      return 0;
    }
  } catch (const std::exception& err) {
    std::string type = "error";
    if (dynamic_cast<const ConfigError*>(&err)) type = "config";
    else if (dynamic_cast<const IoError*>(&err)) type = "io";
    else if (dynamic_cast<const SingularFitError*>(&err)) type = "singular_fit";
    else if (dynamic_cast<const DegenerateInputError*>(&err)) type = "degenerate_input";
    else if (dynamic_cast<const NumericalError*>(&err)) type = "numerical";
    std::fprintf(stderr, "{\"error\":{\"type\":\"%s\",\"message\":\"%s\"}}\n", type.c_str(),
                 err.what());
    return 1;
  }
  return 0;
}
