#include "reuse/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <set>

namespace reuse {

ConfigError::ConfigError(std::string field, const std::string& what)
    : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || std::isnan(out))
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key, "value out of range");
  return int(x);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < 0) throw ConfigError(key, "must be >= 0");
  return std::size_t(x);
}

using Setter = std::function<void(SimConfig&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"mode",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         auto m = parse_mode(v);
         if (!m) throw ConfigError(k, "expected cloud_only, edge_no_reuse or edge_with_reuse, got '" + v + "'");
         c.mode = *m;
       }},
      {"seed",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         std::uint64_t out = 0;
         auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
         if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(k, "expected an unsigned integer");
         c.seed = out;
       }},
      {"trials", [](SimConfig& c, const std::string& k, const std::string& v) { c.trials = to_int(k, v); }},
      {"cost.edge_bandwidth",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.edge_bandwidth = to_double(k, v); }},
      {"cost.cloud_bandwidth",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.cloud_bandwidth = to_double(k, v); }},
      {"cost.edge_capacity_rate",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.edge_capacity_rate = to_double(k, v); }},
      {"cost.cloud_capacity_rate",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.cloud_capacity_rate = to_double(k, v); }},
      {"cost.lookup_cost",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.lookup_cost = to_double(k, v); }},
      {"cost.edge_hops", [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.edge_hops = to_int(k, v); }},
      {"cost.cloud_hops",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.cloud_hops = to_int(k, v); }},
      {"cost.per_hop_latency",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.cost.per_hop_latency = to_double(k, v); }},
      {"edge.slots", [](SimConfig& c, const std::string& k, const std::string& v) { c.edge_slots = to_int(k, v); }},
      {"edge.queue_delay_bound",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.queue_delay_bound = to_double(k, v); }},
      {"store.capacity",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.store.capacity = v == "unlimited" ? kUnlimitedCapacity : to_count(k, v);
       }},
      {"store.tau_full", [](SimConfig& c, const std::string& k, const std::string& v) { c.store.tau_full = to_double(k, v); }},
      {"store.tau_partial",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.store.tau_partial = to_double(k, v); }},
      {"store.partial_fraction",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.store.partial_fraction = to_double(k, v); }},
      {"store.decay_window",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.store.decay_window = to_double(k, v); }},
      {"lsh.tables", [](SimConfig& c, const std::string& k, const std::string& v) { c.store.lsh.num_tables = to_int(k, v); }},
      {"lsh.bits",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.store.lsh.bits_per_table = to_int(k, v); }},
      {"lsh.max_candidates",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.store.max_candidates = to_count(k, v); }},
      {"workload.num_tasks",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.num_tasks = to_count(k, v); }},
      {"workload.redundancy",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         if (v == "ramp") {
           c.redundancy_ramp = true;
         } else {
           c.redundancy_ramp = false;
           c.workload.redundancy_rate = to_double(k, v);
         }
       }},
      {"workload.arrival_rate",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.arrival_rate = to_double(k, v); }},
      {"workload.service",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         if (v.empty() || v.find(',') != std::string::npos) throw ConfigError(k, "must be non-empty without commas");
         c.workload.service = v;
       }},
      {"workload.input_size_min",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.input_size.lo = to_double(k, v); }},
      {"workload.input_size_max",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.input_size.hi = to_double(k, v); }},
      {"workload.output_size_min",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.output_size.lo = to_double(k, v); }},
      {"workload.output_size_max",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.output_size.hi = to_double(k, v); }},
      {"workload.complexity_min",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.complexity.lo = to_double(k, v); }},
      {"workload.complexity_max",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.complexity.hi = to_double(k, v); }},
      {"workload.dimension",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         const int d = to_int(k, v);
         c.workload.dimension = d;
         c.store.lsh.dimension = d;
       }},
      {"workload.noise_sigma",
       [](SimConfig& c, const std::string& k, const std::string& v) { c.workload.noise_sigma = to_double(k, v); }},
      {"workload.feature_file",
       [](SimConfig& c, const std::string&, const std::string& v) {
         if (v.empty()) {
           c.feature_file.reset();
         } else {
           c.feature_file = v;
         }
       }},
  };
  return table;
}

void apply(SimConfig& c, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second(c, key, value);
}

/// Maps a validation failure to the config key it concerns.
std::string field_for(const std::string& message) {
  static const std::vector<std::pair<std::string, std::string>> hints = {
      {"edge_bandwidth", "cost.edge_bandwidth"},
      {"cloud_bandwidth", "cost.cloud_bandwidth"},
      {"edge_capacity_rate", "cost.edge_capacity_rate"},
      {"cloud_capacity_rate", "cost.cloud_capacity_rate"},
      {"lookup_cost", "cost.lookup_cost"},
      {"per_hop_latency", "cost.per_hop_latency"},
      {"edge_hops", "cost.edge_hops"},
      {"cloud_hops", "cost.cloud_hops"},
      {"edge_slots", "edge.slots"},
      {"queue_delay_bound", "edge.queue_delay_bound"},
      {"trials", "trials"},
      {"store capacity", "store.capacity"},
      {"tau_partial", "store.tau_partial"},
      {"tau_full", "store.tau_full"},
      {"partial_fraction", "store.partial_fraction"},
      {"decay_window", "store.decay_window"},
      {"max_candidates", "lsh.max_candidates"},
      {"num_tables", "lsh.tables"},
      {"bits_per_table", "lsh.bits"},
      {"redundancy_rate", "workload.redundancy"},
      {"arrival_rate", "workload.arrival_rate"},
      {"input_size", "workload.input_size_min"},
      {"output_size", "workload.output_size_min"},
      {"complexity", "workload.complexity_min"},
      {"noise_sigma", "workload.noise_sigma"},
      {"dimension", "workload.dimension"},
  };
  for (const auto& [needle, field] : hints)
    if (message.find(needle) != std::string::npos) return field;
  return "config";
}

}  // namespace

SimConfig default_config(Mode mode) {
  SimConfig c;
  c.mode = mode;
  return c;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, s] : setters()) keys.push_back(k);
  return keys;
}

namespace {

std::string assign(SimConfig& c, const std::string& text, const std::string& where) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
  std::string key = trim(std::string_view(text).substr(0, eq));
  const std::string value = trim(std::string_view(text).substr(eq + 1));
  if (key.empty()) throw ConfigError(where, "missing key");
  apply(c, key, value);
  return key;
}

void validate_fields(const SimConfig& c) {
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field_for(e.what()), e.what());
  }
}

}  // namespace

void apply_overrides(SimConfig& config, std::span<const std::string> overrides) {
  for (const std::string& o : overrides) assign(config, o, "override '" + o + "'");
  validate_fields(config);
}

SimConfig parse_config(std::istream& in, std::span<const std::string> overrides) {
  SimConfig c;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    seen.insert(assign(c, line, "line " + std::to_string(line_no)));
  }
  for (const std::string& o : overrides) seen.insert(assign(c, o, "override '" + o + "'"));
  if (!seen.count("mode")) throw ConfigError("mode", "required field is missing");
  validate_fields(c);
  return c;
}

SimConfig parse_config_file(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in, overrides);
}

}  // namespace reuse
