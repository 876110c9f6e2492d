#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/core.hpp"
#include "reuse/reuse_store.hpp"
#include "reuse/workload.hpp"

namespace reuse {

enum class Mode { CloudOnly, EdgeNoReuse, EdgeWithReuse };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

enum class Location { Edge, Cloud };

std::string_view to_string(Location location);

struct SimConfig {
  Mode mode = Mode::EdgeWithReuse;
  CostParams cost;
  int edge_slots = 15;
  // A task whose estimated edge queueing delay exceeds this bound is sent to
  // the cloud instead of being queued. Infinity disables overflow.
  double queue_delay_bound = std::numeric_limits<double>::infinity();
  StoreParams store;
  WorkloadSpec workload;
  // Replace workload.redundancy_rate with ramp_redundancy(num_tasks).
  bool redundancy_ramp = true;
  // Take labels and features from a feature dump instead of the object model.
  std::optional<std::filesystem::path> feature_file;
  int trials = 10;
  std::uint64_t seed = 1;
};

void validate(const SimConfig& config);

/// Workload of one trial: the configured WorkloadSpec with a per-trial seed.
WorkloadSpec workload_for_trial(const SimConfig& config, int trial);
std::vector<Task> tasks_for_trial(const SimConfig& config, int trial);

struct TaskRecord {
  TaskId id = 0;
  std::string service;
  std::string label;
  OutcomeKind outcome = OutcomeKind::EdgeCompute;
  Location location = Location::Edge;
  double arrival_time = 0.0;
  double reception_time = 0.0;  // input fully received by the serving side
  double start_time = 0.0;      // execution (or lookup) begins
  double produced_time = 0.0;   // result ready at the server
  double finish_time = 0.0;     // result received by the user
  double waiting_time = 0.0;      // start - reception
  double computation_time = 0.0;  // produced - reception
  double completion_time = 0.0;   // finish - arrival
  bool correct = true;
  std::optional<std::string> matched_label;
};

struct LoadSplit {
  double cloud = 0.0;
  double edge = 0.0;   // computed from scratch at the edge
  double reuse = 0.0;  // served through the reuse table
};

struct MetricsReport {
  Mode mode = Mode::EdgeWithReuse;
  int trial = 0;
  std::size_t n_tasks = 0;
  double redundancy = 0.0;
  int edge_slots = 0;
  std::uint64_t workload_fingerprint = 0;

  std::vector<TaskRecord> records;

  double mean_completion = 0.0;
  double p90_completion = 0.0;
  double mean_computation = 0.0;
  double p90_computation = 0.0;
  double mean_waiting = 0.0;
  double p90_waiting = 0.0;

  double busy_slot_time = 0.0;
  double makespan = 0.0;
  double utilization = 0.0;  // busy_slot_time / (edge_slots * makespan), in [0, 1]
  LoadSplit load;
  std::size_t reuse_served = 0;
  double correctness_rate = 1.0;  // correct reuse-served / reuse-served
  double mean_in_system = 0.0;    // time-average number of tasks between arrival and finish
};

/// q-th percentile (q in [0, 1]) with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

/// Simulates one explicit task list under `config` (the workload section is
/// ignored apart from the offloaded service name).
MetricsReport run_tasks(const SimConfig& config, std::span<const Task> tasks, int trial = 0);

/// Simulates one trial of the configured workload.
MetricsReport run(const SimConfig& config, int trial = 0);

/// All configured trials, in trial order.
std::vector<MetricsReport> run_trials(const SimConfig& config);

/// Scoring rule for one finished task.
bool correctness_of(const Outcome& outcome, std::string_view task_label);

struct ReuseGain {
  double delay = 0.0;
  double resource = 0.0;
};

/// Gain of reuse over computing from scratch at the edge. Both reports must
/// come from the same workload; throws std::invalid_argument otherwise.
ReuseGain reuse_gain(const MetricsReport& with_reuse, const MetricsReport& without_reuse);

}  // namespace reuse
