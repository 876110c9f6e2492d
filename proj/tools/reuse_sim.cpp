#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reuse/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Edge computation-reuse simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";

  auto* run = app.add_subcommand("run", "Simulate one configuration; writes tasks.csv and summary.csv");
  run->add_option("-c,--config", config_path, "Config file (key = value)")->required();
  run->add_option("-s,--set", overrides, "Override, key=value (repeatable)");
  run->add_option("-o,--out", out_dir, "Output directory");

  std::string scenario;
  auto* sweep = app.add_subcommand("sweep", "Run a named experiment preset across all three modes; writes sweep_<name>.csv");
  sweep->add_option("scenario", scenario, "completion|computation|waiting|utilization|load|gain")->required();
  sweep->add_option("-s,--set", overrides, "Override, key=value (repeatable)");
  sweep->add_option("-o,--out", out_dir, "Output directory");

  reuse::LshParams lsh;
  lsh.bits_per_table = 16;
  std::vector<std::size_t> n_values{1000, 10000, 100000};
  auto* bench = app.add_subcommand("bench-lsh", "Measure LSH query latency and candidate counts; writes bench_lsh.csv");
  bench->add_option("-n,--n", n_values, "Index sizes")->delimiter(',');
  bench->add_option("--tables", lsh.num_tables, "Hash tables (l)");
  bench->add_option("--bits", lsh.bits_per_table, "Bits per table (k); the default suits indexes up to ~10^5 entries");
  bench->add_option("--dimension", lsh.dimension, "Feature dimension (d)");
  bench->add_option("--seed", lsh.seed, "Hyperplane seed");
  bench->add_option("-o,--out", out_dir, "Output directory");

  long dimension = 32;
  double sigma = 0.05;
  auto* calibrate = app.add_subcommand("calibrate", "Suggest store similarity thresholds for a noise level");
  calibrate->add_option("--dimension", dimension, "Feature dimension");
  calibrate->add_option("--sigma", sigma, "Per-coordinate observation noise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? reuse::kExitOk : reuse::kExitConfig;
  }

  if (*run) return reuse::cmd_run(config_path, overrides, out_dir, std::cout, std::cerr);
  if (*sweep) return reuse::cmd_sweep(scenario, out_dir, overrides, std::cout, std::cerr);
  if (*bench) return reuse::cmd_bench_lsh(lsh, n_values, out_dir, std::cout, std::cerr);
  if (*calibrate) return reuse::cmd_calibrate(dimension, sigma, std::cout, std::cerr);
  return reuse::kExitConfig;
}
