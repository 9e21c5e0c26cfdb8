// Benchmark: serial reference runner against the OpenMP runner on the same
// preset, with an output checksum to confirm both paths agree bit for bit.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcvvar/harness.hpp"
#include "rcvvar/parallel.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP replication-runner benchmark"};
  std::string preset_name = "example1";
  int reps = 50;
  std::uint64_t seed = 42;
  std::string thread_list = "1,2,4";
  app.add_option("--preset", preset_name, "example1 | example2 | example3");
  app.add_option("--reps", reps, "Replications");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", thread_list, "Comma list of worker counts (1 = serial reference)");
  CLI11_PARSE(app, argc, argv);

  rcvvar::ExperimentConfig cfg = rcvvar::preset(preset_name);
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.methods = rcvvar::default_methods(cfg);

  std::vector<int> threads;
  {
    std::string cur;
    for (char ch : thread_list + ",") {
      if (ch == ',') {
        if (!cur.empty()) threads.push_back(std::stoi(cur));
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
  }

  std::string reference_csv;
  double reference_time = 0.0;
  std::printf("preset=%s reps=%d methods=%zu\n", preset_name.c_str(), reps, cfg.methods.size());
  std::printf("%-8s %-10s %-9s %s\n", "threads", "seconds", "speedup", "matches_serial");
  for (int t : threads) {
    cfg.parallelism = t;
    const auto start = std::chrono::steady_clock::now();
    const rcvvar::ExperimentResult result = rcvvar::run_experiment(cfg);
    const double elapsed = seconds_since(start);
    const std::string csv = rcvvar::metrics_csv_string(result.metrics);
    if (reference_csv.empty()) {
      reference_csv = csv;
      reference_time = elapsed;
    }
    std::printf("%-8d %-10.3f %-9.2f %s\n", t, elapsed, reference_time / elapsed,
                csv == reference_csv ? "yes" : "NO");
  }
  return 0;
}
