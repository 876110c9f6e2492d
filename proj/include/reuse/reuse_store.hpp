#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "reuse/core.hpp"
#include "reuse/lsh.hpp"

namespace reuse {

inline constexpr std::size_t kUnlimitedCapacity = std::numeric_limits<std::size_t>::max();

struct StoreParams {
  std::size_t capacity = 500;       // entries per service
  double tau_full = 1.0;            // best distance <= tau_full is a full match
  double tau_partial = 2.0;         // (tau_full, tau_partial] is a partial match
  double partial_fraction = 0.5;    // share of the task a partial match covers
  double decay_window = 0.0;        // halve all frequencies every W seconds; 0 disables
  std::size_t max_candidates = 16;
  LshParams lsh;
};

void validate(const StoreParams& p);

struct ReuseEntry {
  EntryId id = 0;
  std::string service;
  FeatureVector features;
  Output output;
  std::uint64_t frequency = 0;
  double inserted_at = 0.0;
  double last_used_at = 0.0;
};

struct LookupResult {
  enum class Kind { Full, Partial, Miss };

  Kind kind = Kind::Miss;
  std::optional<ReuseEntry> entry;  // snapshot taken after the hit was recorded
  double distance = 0.0;
  double remaining_fraction = 1.0;  // 0 for Full, 1 - partial_fraction for Partial

  bool hit() const noexcept { return kind != Kind::Miss; }
};

struct ServiceStats {
  std::size_t entries = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;

  friend bool operator==(const ServiceStats&, const ServiceStats&) = default;
};

struct PlaceResult {
  EntryId id;
  std::optional<EntryId> evicted;
};

/// Reuse Store Table: per-service LSH index plus entry records, classified
/// lookups, and LFU eviction (ties: least recently used, then smallest id).
///
/// Single writer. lookup() mutates frequency counters on hits.
class ReuseStore {
 public:
  explicit ReuseStore(StoreParams params = {});

  const StoreParams& params() const noexcept { return params_; }

  LookupResult lookup(std::string_view service, const FeatureVector& q, double now);

  /// Inserts unconditionally, evicting the LFU victim first when full.
  PlaceResult place(std::string_view service, const FeatureVector& features, Output output, double now);

  /// Throws std::out_of_range if the service has no entries.
  EntryId evict_lfu(std::string_view service);

  std::map<std::string, ServiceStats> stats() const;

  std::size_t size(std::string_view service) const;
  std::size_t size() const;

  /// Entries of one service ordered by id.
  std::vector<ReuseEntry> entries(std::string_view service) const;
  std::vector<std::string> services() const;
  const ReuseEntry* find(std::string_view service, EntryId id) const;

  /// Fingerprint of all entries (ids, frequencies, timestamps, features, outputs).
  std::uint64_t state_hash() const;

  /// Flat record format, one entry per line:
  ///   service,id,frequency,inserted_at,last_used_at,label,v1,...,vd
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static ReuseStore load(std::istream& in, StoreParams params);
  static ReuseStore load(const std::filesystem::path& path, StoreParams params);

 private:
  using LfuKey = std::tuple<std::uint64_t, double, EntryId>;

  struct Table {
    explicit Table(const LshParams& p) : index(p) {}
    LshIndex index;
    std::map<EntryId, ReuseEntry> entries;
    std::set<LfuKey> lfu;
  };

  static LfuKey lfu_key(const ReuseEntry& e) { return {e.frequency, e.last_used_at, e.id}; }

  Table& table_for(std::string_view service);
  Table* find_table(std::string_view service);
  const Table* find_table(std::string_view service) const;
  void insert_entry(Table& table, ReuseEntry entry);
  void apply_decay(double now);

  StoreParams params_;
  std::map<std::string, Table, std::less<>> tables_;
  std::map<std::string, ServiceStats, std::less<>> counters_;
  EntryId next_id_ = 1;
  double next_decay_ = 0.0;
};

}  // namespace reuse
