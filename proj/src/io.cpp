#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rcvvar/harness.hpp"

namespace rcvvar {

namespace {

using nlohmann::json;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  std::string low;
  for (char ch : cell) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return low == "na" || low == "nan" || low == "null";
}

json selector_to_json(const SelectorSpec& s) {
  return json{{"kind", s.name()},   {"size", s.size},        {"steps", s.steps},
              {"folds", s.folds},   {"scad_a", s.scad_a},    {"lambda_grid", s.lambda_grid}};
}

SelectorSpec selector_from_json(const json& j) {
  SelectorSpec s;
  const std::string kind = j.at("kind");
  if (kind == "sis") s.kind = SelectorSpec::Kind::sis;
  else if (kind == "isis") s.kind = SelectorSpec::Kind::isis;
  else if (kind == "stepwise") s.kind = SelectorSpec::Kind::stepwise;
  else if (kind == "lasso") s.kind = SelectorSpec::Kind::lasso;
  else if (kind == "scad") s.kind = SelectorSpec::Kind::scad;
  else throw IoError("unknown selector kind in json: " + kind);
  s.size = j.at("size");
  s.steps = j.at("steps");
  s.folds = j.at("folds");
  s.scad_a = j.at("scad_a");
  s.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  return s;
}

}  // namespace

std::string metrics_csv_string(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << "method,bias,se,ams,ssp,vmv,reps_used,fallback_count\n";
  for (const auto& r : rows) {
    out << r.method << ',' << fmt6(r.bias) << ',' << fmt6(r.se) << ',' << fmt6(r.ams) << ','
        << fmt6(r.ssp) << ',' << fmt6(r.vmv) << ',' << r.reps_used << ',' << r.fallback_count
        << '\n';
  }
  return out.str();
}

void emit_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  write_file(path, metrics_csv_string(rows));
}

void emit_values_csv(const ExperimentResult& result, const std::string& path) {
  std::ostringstream out;
  out << "method,value\n";
  for (const auto& rec : result.records) {
    if (!rec.ok) continue;
    out << result.config.methods[static_cast<std::size_t>(rec.method)].tag << ','
        << fmt6(rec.sigma2) << '\n';
  }
  write_file(path, out.str());
}

void emit_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "method,size,median_sigma2\n";
  for (const auto& r : rows) out << r.method << ',' << r.size << ',' << fmt6(r.median_sigma2) << '\n';
  write_file(path, out.str());
}

void emit_fit_sweep_csv(const std::vector<FitSweepRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "size,naive_sd,rcv_sd,r_squared\n";
  for (const auto& r : rows)
    out << r.size << ',' << fmt6(r.naive_sd) << ',' << fmt6(r.rcv_sd) << ',' << fmt6(r.r2) << '\n';
  write_file(path, out.str());
}

void emit_raw_json(const ExperimentResult& result, const std::string& path) {
  const ExperimentConfig& cfg = result.config;
  json jcfg;
  jcfg["name"] = cfg.name;
  jcfg["n"] = cfg.n;
  jcfg["p"] = cfg.p;
  json jbeta = json::array();
  for (const auto& [j, coef] : cfg.beta) jbeta.push_back(json::array({j, coef}));
  jcfg["beta"] = jbeta;
  jcfg["b"] = cfg.b;
  jcfg["cov"] = {{"kind", cfg.cov.name()}, {"rho", cfg.cov.rho}};
  jcfg["sigma"] = cfg.sigma;
  jcfg["reps"] = cfg.reps;
  jcfg["seed"] = cfg.seed;
  jcfg["parallelism"] = cfg.parallelism;
  json jmethods = json::array();
  for (const auto& m : cfg.methods) {
    jmethods.push_back(json{{"tag", m.tag},
                            {"estimator", static_cast<int>(m.estimator)},
                            {"selector", selector_to_json(m.selector)},
                            {"repeats", m.repeats},
                            {"cv_folds", m.cv_folds}});
  }
  jcfg["methods"] = jmethods;

  json jrecords = json::array();
  for (const auto& r : result.records) {
    jrecords.push_back(json{{"rep", r.rep},
                            {"method", r.method},
                            {"sub_seed", r.sub_seed},
                            {"ok", r.ok},
                            {"error", r.error},
                            {"sigma2", r.sigma2},
                            {"df", r.df},
                            {"size_first", r.size_first},
                            {"size_second", r.size_second},
                            {"size_union", r.size_union},
                            {"gamma", r.gamma},
                            {"screened", r.screened},
                            {"screened_first", r.screened_first},
                            {"screened_second", r.screened_second},
                            {"vmv", r.vmv},
                            {"ridge_fallback", r.ridge_fallback},
                            {"converged", r.converged}});
  }

  json jmetrics = json::array();
  for (const auto& m : result.metrics) {
    jmetrics.push_back(json{{"method", m.method},
                            {"bias", m.bias},
                            {"se", m.se},
                            {"ams", m.ams},
                            {"ssp", m.ssp},
                            {"vmv", m.vmv},
                            {"reps_used", m.reps_used},
                            {"fallback_count", m.fallback_count}});
  }

  json root;
  root["config"] = jcfg;
  root["records"] = jrecords;
  root["metrics"] = jmetrics;
  write_file(path, root.dump(1));
}

ExperimentResult load_raw_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& err) {
    throw IoError("bad json in " + path + ": " + err.what());
  }
  ExperimentResult result;
  const json& jcfg = root.at("config");
  ExperimentConfig& cfg = result.config;
  cfg.name = jcfg.at("name");
  cfg.n = jcfg.at("n");
  cfg.p = jcfg.at("p");
  for (const auto& pair : jcfg.at("beta")) cfg.beta[pair.at(0)] = pair.at(1);
  cfg.b = jcfg.at("b");
  const std::string cov_kind = jcfg.at("cov").at("kind");
  const double rho = jcfg.at("cov").at("rho");
  if (cov_kind == "identity") cfg.cov = CovarianceSpec::identity();
  else if (cov_kind == "equicorrelated") cfg.cov = CovarianceSpec::equicorrelated(rho);
  else cfg.cov = CovarianceSpec::ar1(rho);
  cfg.sigma = jcfg.at("sigma");
  cfg.reps = jcfg.at("reps");
  cfg.seed = jcfg.at("seed");
  cfg.parallelism = jcfg.at("parallelism");
  for (const auto& jm : jcfg.at("methods")) {
    MethodSpec m;
    m.tag = jm.at("tag");
    m.estimator = static_cast<MethodSpec::Estimator>(jm.at("estimator").get<int>());
    m.selector = selector_from_json(jm.at("selector"));
    m.repeats = jm.at("repeats");
    m.cv_folds = jm.at("cv_folds");
    cfg.methods.push_back(m);
  }
  for (const auto& jr : root.at("records")) {
    ReplicationRecord r;
    r.rep = jr.at("rep");
    r.method = jr.at("method");
    r.sub_seed = jr.at("sub_seed");
    r.ok = jr.at("ok");
    r.error = jr.at("error");
    r.sigma2 = jr.at("sigma2");
    r.df = jr.at("df");
    r.size_first = jr.at("size_first");
    r.size_second = jr.at("size_second");
    r.size_union = jr.at("size_union");
    r.gamma = jr.at("gamma");
    r.screened = jr.at("screened");
    r.screened_first = jr.at("screened_first");
    r.screened_second = jr.at("screened_second");
    r.vmv = jr.at("vmv");
    r.ridge_fallback = jr.at("ridge_fallback");
    r.converged = jr.at("converged");
    result.records.push_back(r);
  }
  for (const auto& jm : root.at("metrics")) {
    MetricsRow m;
    m.method = jm.at("method");
    m.bias = jm.at("bias");
    m.se = jm.at("se");
    m.ams = jm.at("ams");
    m.ssp = jm.at("ssp");
    m.vmv = jm.at("vmv");
    m.reps_used = jm.at("reps_used");
    m.fallback_count = jm.at("fallback_count");
    result.metrics.push_back(m);
  }
  return result;
}

IngestResult ingest_csv(const std::string& path, const std::string& response,
                        const std::vector<std::string>& keep_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);
  const std::vector<std::string> header = split_csv_line(line);

  int response_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response) response_col = static_cast<int>(j);
  if (response_col < 0) throw ConfigError("response column not found: " + response);

  for (const std::string& name : keep_names) {
    if (std::find(header.begin(), header.end(), name) == header.end())
      throw ConfigError("keep column not found: " + name);
    if (name == response) throw ConfigError("keep column is the response: " + name);
  }

  const int ncol = static_cast<int>(header.size());
  std::vector<std::vector<double>> rows;
  int dropped = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != ncol)
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(ncol) +
                    " cells, got " + std::to_string(cells.size()));
    std::vector<double> parsed(static_cast<std::size_t>(ncol));
    bool missing = false;
    for (int j = 0; j < ncol && !missing; ++j) {
      const std::string& cell = cells[static_cast<std::size_t>(j)];
      if (is_missing(cell)) {
        missing = true;
        break;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ConfigError("non-numeric column: " + header[static_cast<std::size_t>(j)]);
      }
      if (used != cell.size())
        throw ConfigError("non-numeric column: " + header[static_cast<std::size_t>(j)]);
      parsed[static_cast<std::size_t>(j)] = v;
    }
    if (missing) {
      ++dropped;  // row-drop policy for missing cells
      continue;
    }
    rows.push_back(std::move(parsed));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw ConfigError("csv has fewer than two complete rows: " + path);

  const int p = ncol;  // predictors minus response, plus intercept
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  std::vector<std::string> labels;
  std::vector<int> keep_idx;
  int out_col = 0;
  for (int j = 0; j < ncol; ++j) {
    if (j == response_col) continue;
    for (int i = 0; i < n; ++i) X(i, out_col) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    labels.push_back(header[static_cast<std::size_t>(j)]);
    if (std::find(keep_names.begin(), keep_names.end(), header[static_cast<std::size_t>(j)]) !=
        keep_names.end())
      keep_idx.push_back(out_col);
    ++out_col;
  }
  for (int i = 0; i < n; ++i) y(i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(response_col)];
  X.col(out_col).setOnes();
  labels.push_back("(intercept)");
  keep_idx.push_back(out_col);

  IngestResult result{Dataset(std::move(X), std::move(y), std::move(labels),
                              IndexSet::from_unsorted(std::move(keep_idx))),
                      dropped, response_col, response};
  return result;
}

}  // namespace rcvvar
