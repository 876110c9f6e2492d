#include "reuse/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "reuse/cost.hpp"
#include "reuse/forwarding.hpp"

namespace reuse {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::CloudOnly: return "cloud_only";
    case Mode::EdgeNoReuse: return "edge_no_reuse";
    case Mode::EdgeWithReuse: return "edge_with_reuse";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::CloudOnly, Mode::EdgeNoReuse, Mode::EdgeWithReuse})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

std::string_view to_string(Location location) { return location == Location::Edge ? "edge" : "cloud"; }

void validate(const SimConfig& config) {
  validate(config.cost);
  validate(config.store);
  validate(config.workload);
  if (config.edge_slots < 1) throw std::invalid_argument("edge_slots must be >= 1");
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(config.queue_delay_bound >= 0.0)) throw std::invalid_argument("queue_delay_bound must be >= 0");
  if (config.store.lsh.dimension != config.workload.dimension)
    throw std::invalid_argument("lsh dimension must equal workload dimension");
}

WorkloadSpec workload_for_trial(const SimConfig& config, int trial) {
  WorkloadSpec spec = config.workload;
  spec.seed = derive_seed(config.seed, "workload", std::uint64_t(trial));
  if (config.redundancy_ramp) spec.redundancy_rate = ramp_redundancy(spec.num_tasks);
  return spec;
}

std::vector<Task> tasks_for_trial(const SimConfig& config, int trial) {
  const WorkloadSpec spec = workload_for_trial(config, trial);
  if (config.feature_file) return ingest(*config.feature_file, spec);
  return generate(spec);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * double(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - double(lo)) * (values[hi] - values[lo]);
}

bool correctness_of(const Outcome& outcome, std::string_view task_label) {
  if (!outcome.reused()) return true;
  return outcome.match() && outcome.match()->output.label == task_label;
}

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

/// Event loop of one edge server in front of an unbounded cloud.
class EdgeSimulation {
 public:
  EdgeSimulation(const SimConfig& config, std::span<const Task> tasks, int trial)
      : config_(config),
        tasks_(tasks),
        node_(make_node(config, trial)),
        records_(tasks.size()),
        outcomes_(tasks.size(), Outcome::edge_compute()) {}

  std::vector<TaskRecord> run(double& busy_time) {
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      const Task& t = tasks_[i];
      init_record(i);
      if (config_.mode == Mode::CloudOnly) {
        to_cloud(i, t.arrival_time);
        continue;
      }
      const CostParams& p = config_.cost;
      const double reception = t.arrival_time + t.input_size / p.edge_bandwidth + p.edge_hops * p.per_hop_latency;
      push(reception, EventType::Reception, i);
    }
    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      if (e.type == EventType::Reception) {
        on_reception(e.task, e.time);
      } else {
        on_service_done(e.task, e.time);
      }
    }
    busy_time = busy_time_;
    return std::move(records_);
  }

 private:
  enum class EventType { Reception, ServiceDone };

  struct Event {
    double time;
    std::uint64_t seq;
    EventType type;
    std::size_t task;
  };

  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time > b.time || (a.time == b.time && a.seq > b.seq);
    }
  };

  static EdgeNode make_node(const SimConfig& config, int trial) {
    StoreParams store = config.store;
    store.lsh.seed = derive_seed(config.seed, "lsh", std::uint64_t(trial));
    std::set<std::string, std::less<>> offloaded;
    if (config.mode != Mode::CloudOnly) offloaded.insert(config.workload.service);
    return EdgeNode(std::move(offloaded), std::move(store), config.edge_slots,
                    config.mode == Mode::EdgeWithReuse);
  }

  void push(double time, EventType type, std::size_t task) { events_.push({time, seq_++, type, task}); }

  void init_record(std::size_t i) {
    const Task& t = tasks_[i];
    TaskRecord& r = records_[i];
    r.id = t.id;
    r.service = t.service;
    r.label = t.object_label;
    r.arrival_time = t.arrival_time;
  }

  /// Cloud path: the user's input crosses the bottleneck user-cloud link;
  /// `not_before` keeps the timeline causal when the edge made the decision.
  void to_cloud(std::size_t i, double not_before) {
    const Task& t = tasks_[i];
    const CostParams& p = config_.cost;
    TaskRecord& r = records_[i];
    const double direct = t.arrival_time + t.input_size / p.cloud_bandwidth + p.cloud_hops * p.per_hop_latency;
    r.outcome = OutcomeKind::CloudOffload;
    r.location = Location::Cloud;
    r.reception_time = std::max(direct, not_before);
    r.start_time = r.reception_time;
    r.produced_time = r.start_time + t.complexity / p.cloud_capacity_rate;
    r.finish_time = r.produced_time + t.output_size / p.cloud_bandwidth;
    r.correct = true;
    outcomes_[i] = Outcome::cloud_offload();
  }

  double estimated_wait() const {
    const double mean_service = started_ > 0 ? started_time_ / double(started_) : 0.0;
    return double(queue_.size() + 1) * mean_service / double(config_.edge_slots);
  }

  void on_reception(std::size_t i, double now) {
    const Task& t = tasks_[i];
    records_[i].reception_time = now;
    if (!node_.offers(t.service)) {
      to_cloud(i, now);
      return;
    }
    if (busy_slots_ < config_.edge_slots) {
      start_service(i, now);
      return;
    }
    if (estimated_wait() > config_.queue_delay_bound) {
      to_cloud(i, now);
      return;
    }
    queue_.push_back(i);
  }

  void start_service(std::size_t i, double now) {
    const Task& t = tasks_[i];
    const CostParams& p = config_.cost;
    ++busy_slots_;
    Outcome o = decide(node_, view_of(t), now);
    double duration = 0.0;
    switch (o.kind()) {
      case OutcomeKind::FullReuse:
      case OutcomeKind::PartialReuse:
        duration = reuse_cost(t, o.full(), o.full() ? 0.0 : o.remaining_fraction(), p);
        break;
      case OutcomeKind::EdgeCompute:
        duration = execution_cost(t, true, p);
        break;
      case OutcomeKind::CloudOffload:
        throw std::logic_error("edge service start for a service that is not offloaded");
    }
    TaskRecord& r = records_[i];
    r.location = Location::Edge;
    r.outcome = o.kind();
    r.start_time = now;
    r.correct = correctness_of(o, t.object_label);
    if (o.match()) r.matched_label = o.match()->output.label;
    outcomes_[i] = std::move(o);
    busy_time_ += duration;
    started_time_ += duration;
    ++started_;
    push(now + duration, EventType::ServiceDone, i);
  }

  void on_service_done(std::size_t i, double now) {
    const Task& t = tasks_[i];
    complete(node_, view_of(t), outcomes_[i], Output{t.object_label, t.output_size}, now);
    TaskRecord& r = records_[i];
    r.produced_time = now;
    r.finish_time = now + t.output_size / config_.cost.edge_bandwidth;
    --busy_slots_;
    if (!queue_.empty()) {
      const std::size_t next = queue_.front();
      queue_.pop_front();
      start_service(next, now);
    }
  }

  const SimConfig& config_;
  std::span<const Task> tasks_;
  EdgeNode node_;
  std::vector<TaskRecord> records_;
  std::vector<Outcome> outcomes_;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::deque<std::size_t> queue_;
  std::uint64_t seq_ = 0;
  int busy_slots_ = 0;
  double busy_time_ = 0.0;
  double started_time_ = 0.0;
  std::size_t started_ = 0;
};

double time_average_in_system(const std::vector<TaskRecord>& records, double begin, double end) {
  if (records.empty() || !(end > begin)) return 0.0;
  std::vector<std::pair<double, int>> steps;
  steps.reserve(2 * records.size());
  for (const TaskRecord& r : records) {
    steps.emplace_back(r.arrival_time, +1);
    steps.emplace_back(r.finish_time, -1);
  }
  std::sort(steps.begin(), steps.end());
  double area = 0.0;
  double last = begin;
  long count = 0;
  for (const auto& [time, delta] : steps) {
    area += double(count) * (time - last);
    last = time;
    count += delta;
  }
  return area / (end - begin);
}

}  // namespace

MetricsReport run_tasks(const SimConfig& config, std::span<const Task> tasks, int trial) {
  validate(config);
  for (const Task& t : tasks) {
    validate(t);
    validate_features(t.features, config.store.lsh.dimension);
  }

  MetricsReport m;
  m.mode = config.mode;
  m.trial = trial;
  m.n_tasks = tasks.size();
  m.edge_slots = config.edge_slots;
  m.workload_fingerprint = fingerprint(tasks);

  EdgeSimulation sim(config, tasks, trial);
  m.records = sim.run(m.busy_slot_time);
  if (tasks.empty()) return m;

  std::vector<double> completion, computation, waiting;
  double first_arrival = m.records.front().arrival_time;
  double last_finish = 0.0;
  std::size_t cloud = 0, edge = 0, reused = 0, correct_reused = 0;
  for (TaskRecord& r : m.records) {
    r.waiting_time = r.start_time - r.reception_time;
    r.computation_time = r.produced_time - r.reception_time;
    r.completion_time = r.finish_time - r.arrival_time;
    completion.push_back(r.completion_time);
    computation.push_back(r.computation_time);
    waiting.push_back(r.waiting_time);
    first_arrival = std::min(first_arrival, r.arrival_time);
    last_finish = std::max(last_finish, r.finish_time);
    if (r.location == Location::Cloud) {
      ++cloud;
    } else if (r.outcome == OutcomeKind::EdgeCompute) {
      ++edge;
    } else {
      ++reused;
      if (r.correct) ++correct_reused;
    }
  }
  const double n = double(tasks.size());
  m.mean_completion = mean_of(completion);
  m.p90_completion = percentile(completion, 0.9);
  m.mean_computation = mean_of(computation);
  m.p90_computation = percentile(computation, 0.9);
  m.mean_waiting = mean_of(waiting);
  m.p90_waiting = percentile(waiting, 0.9);
  m.makespan = last_finish - first_arrival;
  m.utilization = m.makespan > 0.0 ? m.busy_slot_time / (double(config.edge_slots) * m.makespan) : 0.0;
  m.load = LoadSplit{double(cloud) / n, double(edge) / n, double(reused) / n};
  m.reuse_served = reused;
  m.correctness_rate = reused == 0 ? 1.0 : double(correct_reused) / double(reused);
  m.mean_in_system = time_average_in_system(m.records, first_arrival, last_finish);
  return m;
}

MetricsReport run(const SimConfig& config, int trial) {
  validate(config);
  const WorkloadSpec spec = workload_for_trial(config, trial);
  const std::vector<Task> tasks = tasks_for_trial(config, trial);
  MetricsReport m = run_tasks(config, tasks, trial);
  m.redundancy = config.feature_file ? 0.0 : spec.redundancy_rate;
  return m;
}

std::vector<MetricsReport> run_trials(const SimConfig& config) {
  validate(config);
  std::vector<MetricsReport> out;
  out.reserve(std::size_t(config.trials));
  for (int trial = 0; trial < config.trials; ++trial) out.push_back(run(config, trial));
  return out;
}

ReuseGain reuse_gain(const MetricsReport& with_reuse, const MetricsReport& without_reuse) {
  if (with_reuse.workload_fingerprint != without_reuse.workload_fingerprint ||
      with_reuse.n_tasks != without_reuse.n_tasks)
    throw std::invalid_argument("reuse_gain: reports come from different workloads");
  ReuseGain g;
  if (without_reuse.mean_completion > 0.0)
    g.delay = 1.0 - with_reuse.mean_completion / without_reuse.mean_completion;
  if (without_reuse.utilization > 0.0) g.resource = 1.0 - with_reuse.utilization / without_reuse.utilization;
  return g;
}

}  // namespace reuse
