#include "reuse/reuse_store.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace reuse {

void validate(const StoreParams& p) {
  validate(p.lsh);
  if (p.capacity < 1) throw std::invalid_argument("store capacity must be >= 1");
  if (!(p.tau_full >= 0.0)) throw std::invalid_argument("store tau_full must be >= 0");
  if (!(p.tau_partial > p.tau_full)) throw std::invalid_argument("store tau_partial must exceed tau_full");
  if (!(p.partial_fraction > 0.0 && p.partial_fraction < 1.0))
    throw std::invalid_argument("store partial_fraction must lie in (0, 1)");
  if (!(p.decay_window >= 0.0)) throw std::invalid_argument("store decay_window must be >= 0");
  if (p.max_candidates < 1) throw std::invalid_argument("store max_candidates must be >= 1");
}

ReuseStore::ReuseStore(StoreParams params) : params_(std::move(params)) {
  validate(params_);
  next_decay_ = params_.decay_window;
}

ReuseStore::Table& ReuseStore::table_for(std::string_view service) {
  auto it = tables_.find(service);
  if (it != tables_.end()) return it->second;
  LshParams p = params_.lsh;
  p.seed = derive_seed(p.seed, service);
  return tables_.emplace(std::string(service), Table(p)).first->second;
}

ReuseStore::Table* ReuseStore::find_table(std::string_view service) {
  auto it = tables_.find(service);
  return it == tables_.end() ? nullptr : &it->second;
}

const ReuseStore::Table* ReuseStore::find_table(std::string_view service) const {
  auto it = tables_.find(service);
  return it == tables_.end() ? nullptr : &it->second;
}

void ReuseStore::apply_decay(double now) {
  if (params_.decay_window <= 0.0) return;
  while (now >= next_decay_) {
    for (auto& [name, table] : tables_) {
      table.lfu.clear();
      for (auto& [id, e] : table.entries) {
        e.frequency /= 2;
        table.lfu.insert(lfu_key(e));
      }
    }
    next_decay_ += params_.decay_window;
  }
}

LookupResult ReuseStore::lookup(std::string_view service, const FeatureVector& q, double now) {
  if (service.empty()) throw std::invalid_argument("lookup: empty service name");
  apply_decay(now);
  auto counter = counters_.find(service);
  if (counter == counters_.end()) counter = counters_.emplace(std::string(service), ServiceStats{}).first;

  Table* table = find_table(service);
  LookupResult result;
  if (table == nullptr || table->entries.empty()) {
    ++counter->second.misses;
    return result;
  }
  const auto best = table->index.query(q, params_.max_candidates);
  if (best.empty() || best.front().distance > params_.tau_partial) {
    ++counter->second.misses;
    return result;
  }

  ReuseEntry& e = table->entries.at(best.front().id);
  table->lfu.erase(lfu_key(e));
  ++e.frequency;
  e.last_used_at = std::max(e.last_used_at, now);
  table->lfu.insert(lfu_key(e));
  ++counter->second.hits;

  result.distance = best.front().distance;
  if (result.distance <= params_.tau_full) {
    result.kind = LookupResult::Kind::Full;
    result.remaining_fraction = 0.0;
  } else {
    result.kind = LookupResult::Kind::Partial;
    result.remaining_fraction = 1.0 - params_.partial_fraction;
  }
  result.entry = e;
  return result;
}

void ReuseStore::insert_entry(Table& table, ReuseEntry entry) {
  table.index.insert(entry.id, entry.features);
  table.lfu.insert(lfu_key(entry));
  const EntryId id = entry.id;
  table.entries.emplace(id, std::move(entry));
}

PlaceResult ReuseStore::place(std::string_view service, const FeatureVector& features, Output output,
                              double now) {
  if (service.empty()) throw std::invalid_argument("place: empty service name");
  validate_features(features, params_.lsh.dimension);
  apply_decay(now);
  PlaceResult result{0, std::nullopt};
  Table& table = table_for(service);
  if (table.entries.size() >= params_.capacity) result.evicted = evict_lfu(service);

  ReuseEntry e;
  e.id = next_id_++;
  e.service = std::string(service);
  e.features = features;
  e.output = std::move(output);
  e.frequency = 0;
  e.inserted_at = now;
  e.last_used_at = now;
  result.id = e.id;
  insert_entry(table, std::move(e));
  return result;
}

EntryId ReuseStore::evict_lfu(std::string_view service) {
  Table* table = find_table(service);
  if (table == nullptr || table->entries.empty())
    throw std::out_of_range("evict_lfu: no entries for service '" + std::string(service) + "'");
  const EntryId victim = std::get<2>(*table->lfu.begin());
  table->lfu.erase(table->lfu.begin());
  table->index.remove(victim);
  table->entries.erase(victim);
  auto counter = counters_.find(service);
  if (counter == counters_.end()) counter = counters_.emplace(std::string(service), ServiceStats{}).first;
  ++counter->second.evictions;
  return victim;
}

std::map<std::string, ServiceStats> ReuseStore::stats() const {
  std::map<std::string, ServiceStats> out;
  for (const auto& [name, c] : counters_) out[name] = c;
  for (const auto& [name, table] : tables_) out[name].entries = table.entries.size();
  return out;
}

std::size_t ReuseStore::size(std::string_view service) const {
  const Table* t = find_table(service);
  return t == nullptr ? 0 : t->entries.size();
}

std::size_t ReuseStore::size() const {
  std::size_t n = 0;
  for (const auto& [name, table] : tables_) n += table.entries.size();
  return n;
}

std::vector<ReuseEntry> ReuseStore::entries(std::string_view service) const {
  std::vector<ReuseEntry> out;
  if (const Table* t = find_table(service))
    for (const auto& [id, e] : t->entries) out.push_back(e);
  return out;
}

std::vector<std::string> ReuseStore::services() const {
  std::vector<std::string> out;
  for (const auto& [name, table] : tables_) out.push_back(name);
  return out;
}

const ReuseEntry* ReuseStore::find(std::string_view service, EntryId id) const {
  const Table* t = find_table(service);
  if (t == nullptr) return nullptr;
  auto it = t->entries.find(id);
  return it == t->entries.end() ? nullptr : &it->second;
}

namespace {

std::uint64_t fnv_bytes(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::uint64_t fnv_value(std::uint64_t h, const T& v) {
  return fnv_bytes(h, &v, sizeof(T));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::uint64_t ReuseStore::state_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, table] : tables_) {
    h = fnv_bytes(h, name.data(), name.size());
    for (const auto& [id, e] : table.entries) {
      h = fnv_value(h, e.id);
      h = fnv_value(h, e.frequency);
      h = fnv_value(h, e.inserted_at);
      h = fnv_value(h, e.last_used_at);
      h = fnv_bytes(h, e.features.data(), sizeof(double) * std::size_t(e.features.size()));
      h = fnv_bytes(h, e.output.label.data(), e.output.label.size());
      h = fnv_value(h, e.output.size_mb);
    }
  }
  return h;
}

void ReuseStore::save(std::ostream& out) const {
  for (const auto& [name, table] : tables_) {
    for (const auto& [id, e] : table.entries) {
      if (name.find(',') != std::string::npos || e.output.label.find(',') != std::string::npos)
        throw std::invalid_argument("snapshot: service and label must not contain commas");
      out << fmt::format("{},{},{},{:.17g},{:.17g},{}", name, e.id, e.frequency, e.inserted_at,
                         e.last_used_at, e.output.label);
      for (Eigen::Index i = 0; i < e.features.size(); ++i) out << fmt::format(",{:.17g}", e.features(i));
      out << '\n';
    }
  }
}

void ReuseStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("snapshot: cannot write " + path.string());
  save(out);
  if (!out) throw std::runtime_error("snapshot: write failed for " + path.string());
}

ReuseStore ReuseStore::load(std::istream& in, StoreParams params) {
  ReuseStore store(std::move(params));
  const Eigen::Index d = store.params_.lsh.dimension;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    auto fail = [&](const std::string& why) {
      return std::runtime_error(fmt::format("snapshot line {}: {}", line_no, why));
    };
    if (fields.size() != std::size_t(6 + d))
      throw fail(fmt::format("expected {} fields, got {}", 6 + d, fields.size()));
    ReuseEntry e;
    try {
      e.service = fields[0];
      e.id = std::stoull(fields[1]);
      e.frequency = std::stoull(fields[2]);
      e.inserted_at = std::stod(fields[3]);
      e.last_used_at = std::stod(fields[4]);
      e.output.label = fields[5];
      e.features.resize(d);
      for (Eigen::Index i = 0; i < d; ++i) e.features(i) = std::stod(fields[6 + std::size_t(i)]);
    } catch (const std::logic_error&) {
      throw fail("unparsable number");
    }
    if (e.service.empty()) throw fail("empty service");
    if (e.last_used_at < e.inserted_at) throw fail("last_used_at precedes inserted_at");
    if (!e.features.allFinite()) throw fail("non-finite feature value");
    Table& table = store.table_for(e.service);
    if (table.entries.size() >= store.params_.capacity) throw fail("service exceeds store capacity");
    for (const auto& [name, other] : store.tables_)
      if (other.index.contains(e.id)) throw fail("duplicate entry id");
    store.next_id_ = std::max(store.next_id_, e.id + 1);
    store.insert_entry(table, std::move(e));
  }
  return store;
}

ReuseStore ReuseStore::load(const std::filesystem::path& path, StoreParams params) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
  return load(in, std::move(params));
}

}  // namespace reuse
