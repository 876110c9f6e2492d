#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/lsh.hpp"
#include "reuse/sim.hpp"

namespace reuse {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

inline constexpr std::string_view kTasksHeader =
    "task_id,service,label,outcome,location,arrival_s,start_s,finish_s,waiting_s,computation_s,completion_s,correct";
inline constexpr std::string_view kSummaryHeader =
    "mode,n_tasks,redundancy,trial,mean_completion_s,p90_completion_s,mean_computation_s,mean_waiting_s,"
    "utilization_pct,load_cloud,load_edge,load_reuse,reuse_gain_delay,reuse_gain_resource,correctness";
inline constexpr std::string_view kSweepHeader =
    "scenario,row_type,mode,grid_value,n_tasks,redundancy,edge_slots,trial,mean_completion_s,p90_completion_s,"
    "mean_computation_s,mean_waiting_s,utilization_pct,load_cloud,load_edge,load_reuse,reuse_gain_delay,"
    "reuse_gain_resource,correctness";
inline constexpr std::string_view kBenchHeader = "n,queries,mean_query_us,mean_candidates,mean_returned";

/// Aggregates of one trial, as written to summary and sweep files.
struct SummaryRow {
  Mode mode = Mode::EdgeWithReuse;
  std::size_t n_tasks = 0;
  double redundancy = 0.0;
  int trial = 0;
  int edge_slots = 0;
  double mean_completion = 0.0;
  double p90_completion = 0.0;
  double mean_computation = 0.0;
  double mean_waiting = 0.0;
  double utilization_pct = 0.0;
  double load_cloud = 0.0;
  double load_edge = 0.0;
  double load_reuse = 0.0;
  double gain_delay = 0.0;
  double gain_resource = 0.0;
  double correctness = 1.0;
};

SummaryRow summarize(const MetricsReport& report, ReuseGain gain = {});

void write_tasks_csv(std::ostream& out, const MetricsReport& report);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Runs every trial of `config`. Reuse runs get their gains from a no-reuse
/// replay of the same workload.
std::vector<SummaryRow> run_summaries(const SimConfig& config, std::vector<MetricsReport>* reports = nullptr);

// ---------------------------------------------------------------------------
// Sweeps

std::vector<std::string> sweep_scenarios();

struct SweepRow {
  std::string scenario;
  bool aggregate = false;  // 90th percentile across trials
  double grid_value = 0.0; // task count or edge capacity percent
  SummaryRow summary;
};

/// Edge slots at which trial 0 runs without queueing: peak number of
/// concurrently executing tasks in an EdgeNoReuse run with unlimited slots.
int required_edge_slots(const SimConfig& config);

/// Base configuration of a scenario before user overrides. Throws
/// std::invalid_argument for an unknown scenario.
SimConfig sweep_base_config(std::string_view scenario);

/// Runs all three modes over the scenario grid. Ramp scenarios use
/// n = 10..100 step 10; capacity scenarios (`utilization`, `load`) use edge
/// capacity 10..100 percent of required_edge_slots() with 1000 tasks.
std::vector<SweepRow> run_sweep(std::string_view scenario, const SimConfig& base);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// ---------------------------------------------------------------------------
// LSH benchmark and threshold calibration

struct BenchRow {
  std::size_t n = 0;
  std::size_t queries = 0;
  double mean_query_us = 0.0;
  double mean_candidates = 0.0;
  double mean_returned = 0.0;
};

/// Clustered data: n / 10 objects, ten noisy observations each. Queries are
/// fresh observations of stored objects.
std::vector<BenchRow> run_bench_lsh(const LshParams& params, std::span<const std::size_t> n_values,
                                    std::size_t queries = 200, std::size_t max_candidates = 16,
                                    double noise_sigma = 0.05);

/// Least-squares slope of log(y) against log(n).
double log_log_slope(std::span<const double> n, std::span<const double> y);

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

struct Calibration {
  double same_median = 0.0;
  double same_q999 = 0.0;
  double cross_q001 = 0.0;
  double cross_median = 0.0;
  double suggested_tau_full = 0.0;
  double suggested_tau_partial = 0.0;
};

/// Distance quantiles of same-object and cross-object observation pairs.
Calibration calibrate_thresholds(Eigen::Index dimension, double noise_sigma, std::size_t pairs = 20000,
                                 std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Command entry points. Messages go to `out`/`err`; the return value is the
// process exit code.

int cmd_run(const std::filesystem::path& config_path, std::span<const std::string> overrides,
            const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

int cmd_sweep(std::string_view scenario, const std::filesystem::path& out_dir,
              std::span<const std::string> overrides, std::ostream& out, std::ostream& err);

int cmd_bench_lsh(const LshParams& params, std::span<const std::size_t> n_values,
                  const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

int cmd_calibrate(Eigen::Index dimension, double noise_sigma, std::ostream& out, std::ostream& err);

}  // namespace reuse
