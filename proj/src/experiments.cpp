#include "reuse/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "reuse/config.hpp"

namespace reuse {

SummaryRow summarize(const MetricsReport& r, ReuseGain gain) {
  SummaryRow s;
  s.mode = r.mode;
  s.n_tasks = r.n_tasks;
  s.redundancy = r.redundancy;
  s.trial = r.trial;
  s.edge_slots = r.edge_slots;
  s.mean_completion = r.mean_completion;
  s.p90_completion = r.p90_completion;
  s.mean_computation = r.mean_computation;
  s.mean_waiting = r.mean_waiting;
  s.utilization_pct = 100.0 * r.utilization;
  s.load_cloud = r.load.cloud;
  s.load_edge = r.load.edge;
  s.load_reuse = r.load.reuse;
  s.gain_delay = gain.delay;
  s.gain_resource = gain.resource;
  s.correctness = r.correctness_rate;
  return s;
}

namespace {

// Fixed precision keeps files byte-stable and diffable.
std::string num(double v) { return fmt::format("{:.6f}", v); }

std::string metric_columns(const SummaryRow& s) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", num(s.mean_completion), num(s.p90_completion),
                     num(s.mean_computation), num(s.mean_waiting), num(s.utilization_pct), num(s.load_cloud),
                     num(s.load_edge), num(s.load_reuse), num(s.gain_delay), num(s.gain_resource),
                     num(s.correctness));
}

void open_for_write(std::ofstream& f, const std::filesystem::path& path) {
  f.open(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
}

}  // namespace

void write_tasks_csv(std::ostream& out, const MetricsReport& report) {
  out << kTasksHeader << '\n';
  for (const TaskRecord& r : report.records) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.id, r.service, r.label, to_string(r.outcome),
                       to_string(r.location), num(r.arrival_time), num(r.start_time), num(r.finish_time),
                       num(r.waiting_time), num(r.computation_time), num(r.completion_time), r.correct ? 1 : 0);
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& s : rows)
    out << fmt::format("{},{},{},{},{}\n", to_string(s.mode), s.n_tasks, num(s.redundancy), s.trial,
                       metric_columns(s));
}

std::vector<SummaryRow> run_summaries(const SimConfig& config, std::vector<MetricsReport>* reports) {
  validate(config);
  std::vector<SummaryRow> rows;
  for (int trial = 0; trial < config.trials; ++trial) {
    MetricsReport r = run(config, trial);
    ReuseGain gain;
    if (config.mode == Mode::EdgeWithReuse) {
      SimConfig plain = config;
      plain.mode = Mode::EdgeNoReuse;
      gain = reuse_gain(r, run(plain, trial));
    }
    rows.push_back(summarize(r, gain));
    if (reports) reports->push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<std::string> sweep_scenarios() {
  return {"completion", "computation", "waiting", "utilization", "load", "gain"};
}

namespace {

bool is_capacity_scenario(std::string_view s) { return s == "utilization" || s == "load"; }

constexpr int kCapacityTasks = 1000;
constexpr double kCapacityRedundancy = 0.8;
constexpr double kCapacityArrivalRate = 10.0;
constexpr double kCapacityQueueBound = 90.0;

}  // namespace

int required_edge_slots(const SimConfig& config) {
  SimConfig c = config;
  c.mode = Mode::EdgeNoReuse;
  c.edge_slots = std::numeric_limits<int>::max() / 2;
  c.queue_delay_bound = std::numeric_limits<double>::infinity();
  const MetricsReport report = run(c, 0);
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * report.records.size());
  for (const TaskRecord& r : report.records) {
    if (r.location != Location::Edge) continue;
    events.emplace_back(r.start_time, 1);
    events.emplace_back(r.produced_time, -1);
  }
  std::sort(events.begin(), events.end());
  int busy = 0;
  int peak = 1;
  for (const auto& [t, delta] : events) {
    busy += delta;
    peak = std::max(peak, busy);
  }
  return peak;
}

SimConfig sweep_base_config(std::string_view scenario) {
  const auto names = sweep_scenarios();
  if (std::find(names.begin(), names.end(), scenario) == names.end())
    throw std::invalid_argument("unknown scenario '" + std::string(scenario) + "'");
  SimConfig c = default_config();
  if (is_capacity_scenario(scenario)) {
    c.redundancy_ramp = false;
    c.workload.num_tasks = kCapacityTasks;
    c.workload.redundancy_rate = kCapacityRedundancy;
    c.workload.arrival_rate = kCapacityArrivalRate;
    c.workload.complexity = {50.0, 150.0};
    c.queue_delay_bound = kCapacityQueueBound;
  } else {
    c.redundancy_ramp = true;
  }
  return c;
}

std::vector<SweepRow> run_sweep(std::string_view scenario, const SimConfig& base) {
  const auto names = sweep_scenarios();
  if (std::find(names.begin(), names.end(), scenario) == names.end())
    throw std::invalid_argument("unknown scenario '" + std::string(scenario) + "'");
  validate(base);

  const bool capacity = is_capacity_scenario(scenario);
  const int required = required_edge_slots(base);
  std::vector<SweepRow> rows;
  std::vector<SweepRow> aggregates;
  for (int step = 1; step <= 10; ++step) {
    SimConfig point = base;
    double grid_value = 0.0;
    if (capacity) {
      grid_value = 10.0 * step;
      point.edge_slots = std::max(1, int(std::lround(grid_value / 100.0 * required)));
    } else {
      grid_value = 10.0 * step;
      point.workload.num_tasks = std::size_t(grid_value);
    }

    std::map<Mode, std::vector<SummaryRow>> by_mode;
    for (int trial = 0; trial < point.trials; ++trial) {
      std::map<Mode, MetricsReport> reports;
      for (Mode mode : {Mode::CloudOnly, Mode::EdgeNoReuse, Mode::EdgeWithReuse}) {
        SimConfig c = point;
        c.mode = mode;
        reports.emplace(mode, run(c, trial));
      }
      for (Mode mode : {Mode::CloudOnly, Mode::EdgeNoReuse, Mode::EdgeWithReuse}) {
        const ReuseGain gain = mode == Mode::EdgeWithReuse
                                   ? reuse_gain(reports.at(mode), reports.at(Mode::EdgeNoReuse))
                                   : ReuseGain{};
        SummaryRow s = summarize(reports.at(mode), gain);
        by_mode[mode].push_back(s);
        rows.push_back(SweepRow{std::string(scenario), false, grid_value, s});
      }
    }
    for (Mode mode : {Mode::CloudOnly, Mode::EdgeNoReuse, Mode::EdgeWithReuse}) {
      const auto& trials = by_mode.at(mode);
      auto p90 = [&](auto field) {
        std::vector<double> v;
        for (const SummaryRow& s : trials) v.push_back(field(s));
        return percentile(v, 0.9);
      };
      SummaryRow agg = trials.front();
      agg.trial = -1;
      agg.mean_completion = p90([](const SummaryRow& s) { return s.mean_completion; });
      agg.p90_completion = p90([](const SummaryRow& s) { return s.p90_completion; });
      agg.mean_computation = p90([](const SummaryRow& s) { return s.mean_computation; });
      agg.mean_waiting = p90([](const SummaryRow& s) { return s.mean_waiting; });
      agg.utilization_pct = p90([](const SummaryRow& s) { return s.utilization_pct; });
      agg.load_cloud = p90([](const SummaryRow& s) { return s.load_cloud; });
      agg.load_edge = p90([](const SummaryRow& s) { return s.load_edge; });
      agg.load_reuse = p90([](const SummaryRow& s) { return s.load_reuse; });
      agg.gain_delay = p90([](const SummaryRow& s) { return s.gain_delay; });
      agg.gain_resource = p90([](const SummaryRow& s) { return s.gain_resource; });
      agg.correctness = p90([](const SummaryRow& s) { return s.correctness; });
      aggregates.push_back(SweepRow{std::string(scenario), true, grid_value, agg});
    }
  }
  rows.insert(rows.end(), aggregates.begin(), aggregates.end());
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    const SummaryRow& s = r.summary;
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.scenario, r.aggregate ? "p90" : "trial",
                       to_string(s.mode), num(r.grid_value), s.n_tasks, num(s.redundancy), s.edge_slots,
                       r.aggregate ? std::string() : std::to_string(s.trial), metric_columns(s));
  }
}

// ---------------------------------------------------------------------------

std::vector<BenchRow> run_bench_lsh(const LshParams& params, std::span<const std::size_t> n_values,
                                    std::size_t queries, std::size_t max_candidates, double noise_sigma) {
  validate(params);
  if (n_values.empty()) throw std::invalid_argument("bench: empty n list");
  if (queries < 1) throw std::invalid_argument("bench: need at least one query");
  std::vector<BenchRow> rows;
  for (std::size_t n : n_values) {
    if (n < 1) throw std::invalid_argument("bench: n must be >= 1");
    const std::size_t objects = std::max<std::size_t>(1, n / 10);
    const ObjectCatalog catalog(params.dimension, noise_sigma, derive_seed(params.seed, "bench-catalog", n));
    Rng noise(derive_seed(params.seed, "bench-noise", n));
    LshIndex index(params);
    for (std::size_t i = 0; i < n; ++i) index.insert(i, catalog.observe(i % objects, noise));

    Rng pick(derive_seed(params.seed, "bench-queries", n));
    std::vector<FeatureVector> probes;
    for (std::size_t q = 0; q < queries; ++q) probes.push_back(catalog.observe(pick.below(objects), noise));

    BenchRow row;
    row.n = n;
    row.queries = queries;
    std::size_t candidates = 0;
    std::size_t returned = 0;
    for (const auto& q : probes) candidates += index.candidates(q).size();
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& q : probes) returned += index.query(q, max_candidates).size();
    const auto t1 = std::chrono::steady_clock::now();
    row.mean_query_us = std::chrono::duration<double, std::micro>(t1 - t0).count() / double(queries);
    row.mean_candidates = double(candidates) / double(queries);
    row.mean_returned = double(returned) / double(queries);
    rows.push_back(row);
  }
  return rows;
}

double log_log_slope(std::span<const double> n, std::span<const double> y) {
  if (n.size() != y.size() || n.size() < 2) throw std::invalid_argument("log_log_slope: need >= 2 paired points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = double(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(n[i]);
    const double v = std::log(std::max(y[i], 1e-300));
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kBenchHeader << '\n';
  for (const BenchRow& r : rows)
    out << fmt::format("{},{},{},{},{}\n", r.n, r.queries, num(r.mean_query_us), num(r.mean_candidates),
                       num(r.mean_returned));
}

Calibration calibrate_thresholds(Eigen::Index dimension, double noise_sigma, std::size_t pairs, std::uint64_t seed) {
  if (dimension < 1 || pairs < 2) throw std::invalid_argument("calibrate: need dimension >= 1 and >= 2 pairs");
  const ObjectCatalog catalog(dimension, noise_sigma, derive_seed(seed, "calibration-catalog"));
  Rng noise(derive_seed(seed, "calibration-noise"));
  std::vector<double> same, cross;
  for (std::size_t i = 0; i < pairs; ++i) {
    same.push_back(distance(catalog.observe(2 * i, noise), catalog.observe(2 * i, noise)));
    cross.push_back(distance(catalog.observe(2 * i, noise), catalog.observe(2 * i + 1, noise)));
  }
  Calibration c;
  c.same_median = percentile(same, 0.5);
  c.same_q999 = percentile(same, 0.999);
  c.cross_q001 = percentile(cross, 0.001);
  c.cross_median = percentile(cross, 0.5);
  c.suggested_tau_full = 2.0 * c.same_q999;
  // Partial band stays well inside the gap between the two populations.
  c.suggested_tau_partial = std::max(std::min(2.0 * c.suggested_tau_full, 0.5 * c.cross_q001),
                                     1.01 * c.suggested_tau_full);
  return c;
}

// ---------------------------------------------------------------------------

int cmd_run(const std::filesystem::path& config_path, std::span<const std::string> overrides,
            const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  SimConfig config;
  try {
    config = parse_config_file(config_path, overrides);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    std::vector<MetricsReport> reports;
    const std::vector<SummaryRow> rows = run_summaries(config, &reports);
    prepare_dir(out_dir);
    std::ofstream tasks, summary;
    open_for_write(tasks, out_dir / "tasks.csv");
    write_tasks_csv(tasks, reports.front());
    open_for_write(summary, out_dir / "summary.csv");
    write_summary_csv(summary, rows);
    if (!tasks.flush() || !summary.flush()) throw std::runtime_error("write failed in " + out_dir.string());

    double completion = 0.0, utilization = 0.0, reuse = 0.0, correctness = 0.0;
    for (const SummaryRow& s : rows) {
      completion += s.mean_completion;
      utilization += s.utilization_pct;
      reuse += s.load_reuse;
      correctness += s.correctness;
    }
    const double k = double(rows.size());
    out << fmt::format("mode={} trials={} n_tasks={} mean_completion_s={:.4f} utilization_pct={:.2f} "
                       "load_reuse={:.3f} correctness={:.3f}\n",
                       to_string(config.mode), rows.size(), rows.front().n_tasks, completion / k, utilization / k,
                       reuse / k, correctness / k);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_sweep(std::string_view scenario, const std::filesystem::path& out_dir,
              std::span<const std::string> overrides, std::ostream& out, std::ostream& err) {
  const auto names = sweep_scenarios();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    err << "unknown scenario '" << scenario << "'; valid scenarios:";
    for (const auto& n : names) err << ' ' << n;
    err << '\n';
    return kExitConfig;
  }
  SimConfig base = sweep_base_config(scenario);
  try {
    apply_overrides(base, overrides);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto rows = run_sweep(scenario, base);
    prepare_dir(out_dir);
    const auto path = out_dir / fmt::format("sweep_{}.csv", scenario);
    std::ofstream f;
    open_for_write(f, path);
    write_sweep_csv(f, rows);
    if (!f.flush()) throw std::runtime_error("write failed: " + path.string());
    out << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_bench_lsh(const LshParams& params, std::span<const std::size_t> n_values,
                  const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    validate(params);
    if (n_values.empty()) throw std::invalid_argument("need at least one n value");
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto rows = run_bench_lsh(params, n_values);
    prepare_dir(out_dir);
    std::ofstream f;
    open_for_write(f, out_dir / "bench_lsh.csv");
    write_bench_csv(f, rows);
    if (!f.flush()) throw std::runtime_error("write failed in " + out_dir.string());
    for (const BenchRow& r : rows)
      out << fmt::format("n={} mean_query_us={:.3f} mean_candidates={:.1f}\n", r.n, r.mean_query_us,
                         r.mean_candidates);
    if (rows.size() >= 2) {
      std::vector<double> n, lat, cand;
      for (const BenchRow& r : rows) {
        n.push_back(double(r.n));
        lat.push_back(r.mean_query_us);
        cand.push_back(r.mean_candidates);
      }
      out << fmt::format("growth exponent: latency {:.3f}, candidates {:.3f}\n", log_log_slope(n, lat),
                         log_log_slope(n, cand));
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_calibrate(Eigen::Index dimension, double noise_sigma, std::ostream& out, std::ostream& err) {
  try {
    const Calibration c = calibrate_thresholds(dimension, noise_sigma);
    out << fmt::format(
        "same-object distance: median {:.4f}, q99.9 {:.4f}\ncross-object distance: q0.1 {:.4f}, median {:.4f}\n"
        "suggested store.tau_full = {:.4f}\nsuggested store.tau_partial = {:.4f}\n",
        c.same_median, c.same_q999, c.cross_q001, c.cross_median, c.suggested_tau_full, c.suggested_tau_partial);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace reuse
