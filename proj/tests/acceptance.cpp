// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "reuse/config.hpp"
#include "reuse/cost.hpp"
#include "reuse/experiments.hpp"
#include "reuse/forwarding.hpp"
#include "reuse/lsh.hpp"
#include "reuse/reuse_store.hpp"
#include "reuse/sim.hpp"

using namespace reuse;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Task make_task(double input, double output, double complexity) {
  Task t;
  t.id = 1;
  t.service = "svc";
  t.object_label = "obj-0";
  t.features = FeatureVector::Ones(4);
  t.input_size = input;
  t.output_size = output;
  t.complexity = complexity;
  return t;
}

ReuseMatch some_match() { return ReuseMatch{1, Output{"obj-0", 0.1}, 0.0}; }

// 1. Cost-model worked examples and the completion-cost identity.
Verdict cost_exactness() {
  const auto t0 = Clock::now();
  CostParams p;
  p.per_hop_latency = 0.0;
  p.edge_bandwidth = 10.0;
  p.cloud_bandwidth = 2.0;
  p.edge_capacity_rate = 50.0;
  p.cloud_capacity_rate = 500.0;
  p.lookup_cost = 0.001;
  const Task t = make_task(8.0, 2.0, 100.0);

  struct Case {
    const char* name;
    double got;
    double want;
  };
  const Case cases[] = {
      {"comm edge", communication_cost(t, true, p), 1.0},
      {"comm cloud", communication_cost(t, false, p), 5.0},
      {"comm zero data", communication_cost(make_task(0, 0, 1), true, p), 0.0},
      {"exec edge", execution_cost(t, true, p), 2.0},
      {"exec cloud", execution_cost(t, false, p), 0.2},
      {"reuse full", reuse_cost(t, true, 0.0, p), 0.001},
      {"reuse partial", reuse_cost(t, false, 0.5, p), 1.001},
      {"reuse nothing", reuse_cost(t, false, 1.0, p), 0.001 + 2.0},
      {"zeta cloud", completion_cost(t, Outcome::cloud_offload(), p).total, 5.0 + 0.2},
      {"zeta full", completion_cost(t, Outcome::full_reuse(some_match()), p).total, 1.001},
      {"zeta edge", completion_cost(t, Outcome::edge_compute(), p).total, 3.0},
  };
  for (const Case& c : cases)
    if (std::abs(c.got - c.want) > 1e-9) return {false, fmt::format("{}: got {} want {}", c.name, c.got, c.want)};

  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CostParams q;
    q.edge_bandwidth = rng.uniform(0.5, 200.0);
    q.cloud_bandwidth = rng.uniform(0.5, 200.0);
    q.edge_capacity_rate = rng.uniform(1.0, 1000.0);
    q.cloud_capacity_rate = rng.uniform(1.0, 1000.0);
    q.lookup_cost = rng.uniform(0.0, 0.1);
    q.edge_hops = int(rng.below(5)) + 1;
    q.cloud_hops = int(rng.below(10)) + 1;
    q.per_hop_latency = rng.uniform(0.0, 0.05);
    const Task task = make_task(rng.uniform(0.0, 50.0), rng.uniform(0.0, 5.0), rng.uniform(0.1, 500.0));
    Outcome o = Outcome::edge_compute();
    switch (rng.below(4)) {
      case 0: o = Outcome::cloud_offload(); break;
      case 1: o = Outcome::edge_compute(); break;
      case 2: o = Outcome::full_reuse(some_match()); break;
      default: o = Outcome::partial_reuse(some_match(), rng.uniform(0.01, 0.99)); break;
    }
    const CostBreakdown b = completion_cost(task, o, q);
    const auto want = oracle::evaluate(task, o.at_edge(), o.reused(), o.full(), o.remaining_fraction(), q);
    const double g = o.reused() ? 1.0 : 0.0;
    const double reassembled = b.communication + (1.0 - g) * b.execution + g * b.reuse;
    worst = std::max({worst, std::abs(reassembled - b.total), std::abs(want.zeta - b.total)});
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst <= 1e-12 && elapsed < 1.0;
  return {ok, fmt::format("11 examples exact, identity max error {:.2e} over 10^4 inputs, {:.3f} s", worst, elapsed)};
}

// 2. Per-table collision frequency against (1 - theta/pi)^k.
Verdict lsh_collision_law() {
  const auto t0 = Clock::now();
  constexpr int kBits = 8;
  constexpr int kTables = 100;
  constexpr int kPairs = 1000;  // kTables * kPairs = 10^5 trials per angle
  constexpr Eigen::Index kDim = 16;
  std::string detail;
  bool ok = true;
  Rng rng(202);
  for (double theta : {0.05, 0.1, 0.3, 0.6}) {
    long collisions = 0;
    for (int pair = 0; pair < kPairs; ++pair) {
      LshParams p{kTables, kBits, kDim, rng.next_u64()};
      const LshIndex index(p);
      FeatureVector u = oracle::random_vector(rng, kDim).normalized();
      FeatureVector w = oracle::random_vector(rng, kDim);
      w = (w - w.dot(u) * u).normalized();
      const FeatureVector v = std::cos(theta) * u + std::sin(theta) * w;
      const Signature a = index.signature(u);
      const Signature b = index.signature(v);
      for (int t = 0; t < kTables; ++t) collisions += a.keys[t] == b.keys[t];
    }
    const double freq = double(collisions) / double(kTables * kPairs);
    const double want = std::pow(1.0 - theta / std::numbers::pi, kBits);
    ok = ok && std::abs(freq - want) <= 0.02;
    detail += fmt::format("theta={} freq={:.4f} want={:.4f}; ", theta, freq, want);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 30.0;
  return {ok, detail + fmt::format("{:.2f} s", elapsed)};
}

// 3. Eviction sequences against a brute-force LFU model.
Verdict lfu_equivalence() {
  const auto t0 = Clock::now();
  constexpr Eigen::Index kDim = 8;
  Rng rng(303);
  long evictions = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    StoreParams params;
    params.capacity = 1 + rng.below(5);
    params.lsh.dimension = kDim;
    params.lsh.num_tables = 4;
    params.lsh.bits_per_table = 4;
    params.lsh.seed = rng.next_u64();
    ReuseStore store(params);
    oracle::LfuModel model(params.capacity);
    std::vector<std::pair<EntryId, FeatureVector>> placed;
    double now = 0.0;
    std::vector<EntryId> got, want;
    const int ops = 10 + int(rng.below(30));
    for (int op = 0; op < ops; ++op) {
      if (rng.uniform() < 0.5) now += double(rng.below(3));  // equal timestamps happen often
      const double r = rng.uniform();
      if (r < 0.4 || placed.empty()) {
        const FeatureVector v = oracle::random_vector(rng, kDim, 10.0);
        const PlaceResult pr = store.place("svc", v, Output{"x", 0.1}, now);
        const auto ev = model.place(pr.id, now);
        if (pr.evicted) got.push_back(*pr.evicted);
        if (ev) want.push_back(*ev);
        placed.emplace_back(pr.id, v);
      } else if (r < 0.9) {
        const auto& [id, v] = placed[rng.below(placed.size())];
        const LookupResult lr = store.lookup("svc", v, now);
        const bool alive = model.contains(id);
        if (alive != lr.hit() || (alive && lr.entry->id != id))
          return {false, fmt::format("sequence {} op {}: lookup disagreement", seq, op)};
        if (alive) model.hit(id, now);
      } else if (store.size("svc") > 0) {
        got.push_back(store.evict_lfu("svc"));
        want.push_back(model.evict());
      }
    }
    if (got != want) return {false, fmt::format("sequence {}: eviction order differs", seq)};
    evictions += long(got.size());
  }
  const double elapsed = seconds_since(t0);
  return {elapsed < 10.0, fmt::format("10^4 sequences, {} evictions identical, {:.2f} s", evictions, elapsed)};
}

// 4. Forwarding decisions against the reference interpreter.
Verdict forwarding_trace() {
  constexpr Eigen::Index kDim = 16;
  Rng rng(404);
  const std::vector<std::string> services = {"detect", "classify", "segment"};
  long counts[4] = {0, 0, 0, 0};
  for (int seq = 0; seq < 100; ++seq) {
    StoreParams params;
    params.capacity = 1 + rng.below(6);
    params.tau_full = rng.uniform(0.2, 1.0);
    params.tau_partial = params.tau_full + rng.uniform(0.2, 1.5);
    params.partial_fraction = rng.uniform(0.1, 0.9);
    params.lsh.dimension = kDim;
    params.lsh.num_tables = 1 + int(rng.below(8));
    params.lsh.bits_per_table = 1 + int(rng.below(10));
    params.lsh.seed = rng.next_u64();
    std::set<std::string, std::less<>> offloaded = {"detect", "classify"};
    EdgeNode node(offloaded, params, 2);
    oracle::Forwarder ref({"detect", "classify"}, params);

    std::vector<FeatureVector> objects;
    for (int i = 0; i < 6; ++i) objects.push_back(oracle::random_vector(rng, kDim, 2.0));
    const double sigma = std::array{0.0, 0.05, 0.15, 0.3}[rng.below(4)];
    const int n = 1 + int(rng.below(50));
    double now = 0.0;
    for (int i = 0; i < n; ++i) {
      now += rng.uniform(0.0, 1.0);
      const std::string& service = services[rng.below(services.size())];
      FeatureVector v = objects[rng.below(objects.size())];
      for (Eigen::Index j = 0; j < kDim; ++j) v(j) += sigma * rng.normal();
      const TaskView view{service, v};
      const Outcome o = decide(node, view, now);
      const oracle::Decision want = ref.decide(service, v, now);
      const oracle::Decision got = oracle::decision_of(o);
      if (!oracle::matches(got, want))
        return {false, fmt::format("sequence {} task {}: got {} entry {}, want {} entry {}", seq, i,
                                   to_string(got.kind), got.entry, to_string(want.kind), want.entry)};
      ++counts[int(o.kind())];
      complete(node, view, o, Output{"y", 0.1}, now);
      ref.complete(service, v, want, now);
    }
  }
  return {true, fmt::format("100 sequences identical (full {}, partial {}, edge {}, cloud {})", counts[0],
                            counts[1], counts[2], counts[3])};
}

// 5. Mean completion ordering over the redundancy ramp.
Verdict completion_trend() {
  const auto t0 = Clock::now();
  int good_trials = 0;
  double worst_reduction = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    bool ok = true;
    for (std::size_t n = 10; n <= 100; n += 10) {
      SimConfig c = default_config();
      c.workload.num_tasks = n;
      c.mode = Mode::CloudOnly;
      const double cloud = run(c, trial).mean_completion;
      c.mode = Mode::EdgeNoReuse;
      const double plain = run(c, trial).mean_completion;
      c.mode = Mode::EdgeWithReuse;
      const double reused = run(c, trial).mean_completion;
      ok = ok && reused <= plain && plain <= cloud;
      if (n == 100) {
        const double reduction = 1.0 - reused / plain;
        worst_reduction = std::min(worst_reduction, reduction);
        ok = ok && reduction >= 0.5;
      }
    }
    good_trials += ok;
  }
  const double elapsed = seconds_since(t0);
  return {good_trials >= 9 && elapsed < 120.0,
          fmt::format("{}/10 trials hold, smallest n=100 reduction {:.3f}, {:.2f} s", good_trials, worst_reduction,
                      elapsed)};
}

// 6. Edge utilization at full capacity, 1000 tasks, redundancy 0.8.
Verdict utilization_trend() {
  const auto t0 = Clock::now();
  SimConfig base = sweep_base_config("utilization");
  base.edge_slots = required_edge_slots(base);
  int good = 0;
  double worst = 0.0;
  for (int trial = 0; trial < base.trials; ++trial) {
    SimConfig c = base;
    c.mode = Mode::EdgeNoReuse;
    const double plain = run(c, trial).utilization;
    c.mode = Mode::EdgeWithReuse;
    const double reused = run(c, trial).utilization;
    worst = std::max(worst, reused / plain);
    good += reused <= 0.4 * plain;
  }
  const double elapsed = seconds_since(t0);
  return {good == base.trials && elapsed < 120.0,
          fmt::format("{} slots, largest reuse/no-reuse utilization ratio {:.3f} over {} trials, {:.2f} s",
                      base.edge_slots, worst, base.trials, elapsed)};
}

// 7. Share of tasks served at the edge with 10% of the required slots.
Verdict load_split() {
  SimConfig base = sweep_base_config("load");
  const int required = required_edge_slots(base);
  base.edge_slots = std::max(1, int(std::lround(0.1 * required)));
  bool ok = true;
  double max_plain = 0.0, min_reuse = 1.0;
  for (int trial = 0; trial < base.trials; ++trial) {
    SimConfig c = base;
    c.mode = Mode::EdgeNoReuse;
    const LoadSplit plain = run(c, trial).load;
    c.mode = Mode::EdgeWithReuse;
    const LoadSplit reused = run(c, trial).load;
    max_plain = std::max(max_plain, plain.edge + plain.reuse);
    min_reuse = std::min(min_reuse, reused.edge + reused.reuse);
    ok = ok && plain.edge + plain.reuse < 0.5 && reused.edge + reused.reuse >= 0.95;
  }
  return {ok, fmt::format("{} of {} slots; no-reuse edge share <= {:.3f}, reuse edge share >= {:.3f} over {} trials",
                          base.edge_slots, required, max_plain, min_reuse, base.trials)};
}

// 8. Correctness of reuse-served tasks.
Verdict correctness() {
  SimConfig c = default_config();
  c.redundancy_ramp = false;
  c.workload.num_tasks = 1000;
  c.workload.redundancy_rate = ramp_redundancy(100);
  c.workload.noise_sigma = 0.05;
  c.store.capacity = 500;
  double worst = 1.0;
  for (int trial = 0; trial < c.trials; ++trial) worst = std::min(worst, run(c, trial).correctness_rate);

  SimConfig exact = c;
  exact.store.capacity = kUnlimitedCapacity;
  exact.workload.noise_sigma = 0.0;
  double exact_worst = 1.0;
  for (int trial = 0; trial < exact.trials; ++trial)
    exact_worst = std::min(exact_worst, run(exact, trial).correctness_rate);
  return {worst >= 0.85 && exact_worst == 1.0,
          fmt::format("sigma 0.05 capacity 500: min rate {:.4f}; sigma 0 unlimited: min rate {:.4f}", worst,
                      exact_worst)};
}

// 9. Reuse gain at zero redundancy and its growth with redundancy.
Verdict gain_sanity() {
  SimConfig c = default_config();
  c.redundancy_ramp = false;
  c.workload.num_tasks = 100;
  auto gain_at = [&](double redundancy, int trial) {
    SimConfig x = c;
    x.workload.redundancy_rate = redundancy;
    x.mode = Mode::EdgeNoReuse;
    const MetricsReport plain = run(x, trial);
    x.mode = Mode::EdgeWithReuse;
    return reuse_gain(run(x, trial), plain);
  };
  double worst_zero = 0.0;
  int monotone = 0;
  for (int trial = 0; trial < c.trials; ++trial) {
    const ReuseGain z = gain_at(0.0, trial);
    worst_zero = std::max({worst_zero, std::abs(z.delay), std::abs(z.resource)});
    bool ok = true;
    ReuseGain prev{-1e300, -1e300};
    for (int step = 1; step <= 8; ++step) {
      const ReuseGain g = gain_at(0.1 * step, trial);
      ok = ok && g.delay >= prev.delay && g.resource >= prev.resource;
      prev = g;
    }
    monotone += ok;
  }
  return {worst_zero <= 0.05 && monotone >= 9,
          fmt::format("zero-redundancy |gain| <= {:.4f}; non-decreasing in {}/10 trials", worst_zero, monotone)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Repeated commands write identical bytes.
Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "reuse_acceptance_determinism";
  fs::remove_all(root);
  const fs::path config = root / "run.cfg";
  fs::create_directories(root);
  {
    std::ofstream f(config);
    f << "mode = edge_with_reuse\nworkload.num_tasks = 200\ntrials = 3\n";
  }
  std::ostringstream sink;
  const std::vector<std::string> none;
  bool ok = true;
  for (const char* dir : {"a", "b"}) {
    ok = ok && cmd_run(config, none, root / dir, sink, sink) == kExitOk;
    ok = ok && cmd_sweep("completion", root / dir, none, sink, sink) == kExitOk;
  }
  std::size_t bytes = 0;
  for (const char* file : {"tasks.csv", "summary.csv", "sweep_completion.csv"}) {
    const std::string a = slurp(root / "a" / file);
    const std::string b = slurp(root / "b" / file);
    ok = ok && !a.empty() && a == b;
    bytes += a.size();
  }
  fs::remove_all(root);
  return {ok, fmt::format("run and sweep outputs byte-identical ({} bytes compared)", bytes)};
}

// 11. Little's law on a long no-reuse run.
Verdict littles_law() {
  SimConfig c = default_config(Mode::EdgeNoReuse);
  c.redundancy_ramp = false;
  c.workload.redundancy_rate = 0.0;
  c.workload.num_tasks = 20000;
  const MetricsReport m = run(c, 0);
  const double lambda_w = c.workload.arrival_rate * m.mean_completion;
  const double err = std::abs(m.mean_in_system - lambda_w) / lambda_w;
  return {err <= 0.10 && m.utilization < 0.8,
          fmt::format("L={:.4f} lambda*W={:.4f} relative error {:.4f}, utilization {:.3f}", m.mean_in_system, lambda_w,
                      err, m.utilization)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"cost model exactness", cost_exactness},
      {"LSH collision law", lsh_collision_law},
      {"LFU oracle equivalence", lfu_equivalence},
      {"forwarding trace oracle", forwarding_trace},
      {"completion-time trend", completion_trend},
      {"utilization trend", utilization_trend},
      {"load-split trend", load_split},
      {"reuse correctness", correctness},
      {"reuse-gain sanity", gain_sanity},
      {"determinism", determinism},
      {"Little's law", littles_law},
  };
  int failed = 0;
  int number = 0;
  for (const auto& [name, check] : criteria) {
    ++number;
    Verdict v{false, ""};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", number, name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
