#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "reuse/core.hpp"
#include "reuse/random.hpp"

namespace reuse {

struct LshParams {
  int num_tables = 8;       // l
  int bits_per_table = 8;   // k, at most 64
  Eigen::Index dimension = 32;
  std::uint64_t seed = 0x5eed;
};

inline void validate(const LshParams& p) {
  if (p.num_tables < 1) throw std::invalid_argument("lsh num_tables must be >= 1");
  if (p.bits_per_table < 1 || p.bits_per_table > 64)
    throw std::invalid_argument("lsh bits_per_table must be in [1, 64]");
  if (p.dimension < 1) throw std::invalid_argument("lsh dimension must be >= 1");
}

/// One k-bit bucket key per table.
struct Signature {
  std::vector<std::uint64_t> keys;
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Draws l*k unit hyperplanes in R^d. Row t*k + j is hyperplane j of table t.
/// Rows are filled in order from a single Rng stream seeded by `seed`.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> draw_hyperplanes(const LshParams& p) {
  validate(p);
  const Eigen::Index rows = Eigen::Index(p.num_tables) * p.bits_per_table;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> planes(rows, p.dimension);
  Rng rng(derive_seed(p.seed, "lsh-hyperplanes"));
  for (Eigen::Index r = 0; r < rows; ++r) {
    double norm = 0.0;
    do {
      for (Eigen::Index c = 0; c < p.dimension; ++c) planes(r, c) = Scalar(rng.normal());
      norm = double(planes.row(r).norm());
    } while (norm == 0.0);
    planes.row(r) /= Scalar(norm);
  }
  return planes;
}

/// Sign-of-random-projection LSH over Euclidean feature vectors.
///
/// Each of the l tables hashes a vector to the k-bit key whose bit j is set
/// iff the projection onto hyperplane j is >= 0. Two vectors at angle theta
/// share a table's key with probability (1 - theta/pi)^k. Queries take the
/// union of the l addressed buckets and rank it by exact distance.
///
/// Const members may be called concurrently; insert/remove need exclusive access.
template <typename Scalar = double>
class BasicLshIndex {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Candidate {
    EntryId id;
    Scalar distance;
    friend bool operator==(const Candidate&, const Candidate&) = default;
  };

  explicit BasicLshIndex(const LshParams& params)
      : params_(params), planes_(draw_hyperplanes<Scalar>(params)), tables_(params.num_tables) {}

  const LshParams& params() const noexcept { return params_; }
  const Matrix& hyperplanes() const noexcept { return planes_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(EntryId id) const { return entries_.count(id) != 0; }

  template <typename Derived>
  Signature signature(const Eigen::MatrixBase<Derived>& v) const {
    check_dimension(v.size());
    const Vector proj = planes_ * v;
    const int k = params_.bits_per_table;
    Signature sig;
    sig.keys.resize(params_.num_tables, 0);
    for (int t = 0; t < params_.num_tables; ++t) {
      std::uint64_t key = 0;
      for (int j = 0; j < k; ++j)
        if (proj(Eigen::Index(t) * k + j) >= Scalar(0)) key |= std::uint64_t(1) << j;
      sig.keys[t] = key;
    }
    return sig;
  }

  void insert(EntryId id, const Vector& v) {
    if (!v.allFinite()) throw std::invalid_argument("lsh insert: non-finite feature vector");
    if (contains(id)) throw std::invalid_argument("lsh insert: duplicate id " + std::to_string(id));
    Signature sig = signature(v);
    for (int t = 0; t < params_.num_tables; ++t) tables_[t][sig.keys[t]].push_back(id);
    entries_.emplace(id, Stored{v, std::move(sig)});
  }

  void remove(EntryId id) {
    auto it = entries_.find(id);
    if (it == entries_.end()) throw std::out_of_range("lsh remove: unknown id " + std::to_string(id));
    for (int t = 0; t < params_.num_tables; ++t) {
      auto bucket = tables_[t].find(it->second.sig.keys[t]);
      auto& ids = bucket->second;
      ids.erase(std::find(ids.begin(), ids.end(), id));
      if (ids.empty()) tables_[t].erase(bucket);
    }
    entries_.erase(it);
  }

  /// Ids sharing at least one bucket with `q`, ascending and deduplicated.
  template <typename Derived>
  std::vector<EntryId> candidates(const Eigen::MatrixBase<Derived>& q) const {
    return collect(signature(q));
  }

  /// Up to `max_candidates` bucket-mates of `q`, nearest first, ties by id.
  template <typename Derived>
  std::vector<Candidate> query(const Eigen::MatrixBase<Derived>& q, std::size_t max_candidates) const {
    if (max_candidates < 1) throw std::invalid_argument("lsh query: max_candidates must be >= 1");
    const std::vector<EntryId> ids = collect(signature(q));
    std::vector<Candidate> scored;
    scored.reserve(ids.size());
    for (EntryId id : ids) scored.push_back({id, (entries_.at(id).v - q).norm()});
    auto closer = [](const Candidate& a, const Candidate& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
    };
    if (scored.size() > max_candidates) {
      std::partial_sort(scored.begin(), scored.begin() + max_candidates, scored.end(), closer);
      scored.resize(max_candidates);
    } else {
      std::sort(scored.begin(), scored.end(), closer);
    }
    return scored;
  }

  const Vector& vector_of(EntryId id) const { return entries_.at(id).v; }
  const Signature& signature_of(EntryId id) const { return entries_.at(id).sig; }

  /// Total id references over all buckets of all tables (l per entry).
  std::size_t bucket_references() const {
    std::size_t n = 0;
    for (const auto& table : tables_)
      for (const auto& [key, ids] : table) n += ids.size();
    return n;
  }

  /// Ids stored in bucket `key` of table `table`, in insertion order.
  std::vector<EntryId> bucket(int table, std::uint64_t key) const {
    auto it = tables_.at(table).find(key);
    return it == tables_.at(table).end() ? std::vector<EntryId>{} : it->second;
  }

 private:
  struct Stored {
    Vector v;
    Signature sig;
  };

  void check_dimension(Eigen::Index n) const {
    if (n != params_.dimension) throw DimensionMismatch(params_.dimension, n);
  }

  std::vector<EntryId> collect(const Signature& sig) const {
    std::vector<EntryId> ids;
    for (int t = 0; t < params_.num_tables; ++t) {
      auto it = tables_[t].find(sig.keys[t]);
      if (it != tables_[t].end()) ids.insert(ids.end(), it->second.begin(), it->second.end());
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  LshParams params_;
  Matrix planes_;
  std::vector<std::unordered_map<std::uint64_t, std::vector<EntryId>>> tables_;
  std::unordered_map<EntryId, Stored> entries_;
};

using LshIndex = BasicLshIndex<double>;

inline LshIndex build(const LshParams& params) { return LshIndex(params); }

}  // namespace reuse
