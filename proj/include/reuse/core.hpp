#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reuse {

/// Extracted input features of one task. Dimension is fixed per experiment.
using FeatureVector = Eigen::VectorXd;

using EntryId = std::uint64_t;
using TaskId = std::uint64_t;

/// Two feature vectors from different feature spaces were combined.
class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(Eigen::Index expected, Eigen::Index actual);
  Eigen::Index expected() const noexcept { return expected_; }
  Eigen::Index actual() const noexcept { return actual_; }

 private:
  Eigen::Index expected_;
  Eigen::Index actual_;
};

/// Throws std::invalid_argument for an empty or non-finite vector and
/// DimensionMismatch when `dimension` is given and differs.
void validate_features(const FeatureVector& v, std::optional<Eigen::Index> dimension = {});

/// Euclidean distance between two feature vectors of equal dimension.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar distance(const Eigen::MatrixBase<DerivedA>& a,
                                   const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  return (a - b).norm();
}

/// 1 - cos(a, b). Not a metric; kept for experiments on direction-only features.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_distance(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  const Scalar denom = a.norm() * b.norm();
  if (denom == Scalar(0)) return a.isApprox(b) ? Scalar(0) : Scalar(1);
  return Scalar(1) - a.dot(b) / denom;
}

/// Result of a service invocation as stored in the reuse table.
struct Output {
  std::string label;
  double size_mb = 0.0;

  friend bool operator==(const Output&, const Output&) = default;
};

/// One service invocation. Sizes in megabits, complexity in compute-units,
/// arrival in seconds since simulation start.
struct Task {
  TaskId id = 0;
  std::string service;
  // Ground truth, read only by correctness scoring.
  std::string object_label;
  FeatureVector features;
  double input_size = 0.0;
  double output_size = 0.0;
  double complexity = 1.0;
  double arrival_time = 0.0;
};

void validate(const Task& t);

/// The part of a task the forwarding plane is allowed to see.
struct TaskView {
  std::string_view service;
  const FeatureVector& features;
};

inline TaskView view_of(const Task& t) { return TaskView{t.service, t.features}; }

/// Network and compute parameters. Bandwidth in Mb/s, rates in
/// compute-units/s, latencies in seconds.
struct CostParams {
  double edge_bandwidth = 100.0;
  double cloud_bandwidth = 5.0;
  double edge_capacity_rate = 50.0;
  double cloud_capacity_rate = 500.0;
  double lookup_cost = 0.001;
  int edge_hops = 1;
  int cloud_hops = 6;
  double per_hop_latency = 0.005;
};

void validate(const CostParams& p);

enum class OutcomeKind { FullReuse, PartialReuse, EdgeCompute, CloudOffload };

std::string_view to_string(OutcomeKind kind);

struct ReuseMatch {
  EntryId entry = 0;
  Output output;
  double distance = 0.0;
};

/// Per-task forwarding decision. The factories are the only way to build
/// one, so the kind/fraction/match combination is always consistent.
class Outcome {
 public:
  static Outcome full_reuse(ReuseMatch match);
  /// `reused_fraction` is the share of the task covered by the match, in (0, 1).
  static Outcome partial_reuse(ReuseMatch match, double reused_fraction);
  static Outcome edge_compute();
  static Outcome cloud_offload();

  OutcomeKind kind() const noexcept { return kind_; }
  double reused_fraction() const noexcept { return reused_fraction_; }
  double remaining_fraction() const noexcept { return 1.0 - reused_fraction_; }
  const std::optional<ReuseMatch>& match() const noexcept { return match_; }

  /// x_t^e: handled at the edge.
  bool at_edge() const noexcept { return kind_ != OutcomeKind::CloudOffload; }
  /// gamma_t: served through the reuse table.
  bool reused() const noexcept {
    return kind_ == OutcomeKind::FullReuse || kind_ == OutcomeKind::PartialReuse;
  }
  /// r_t: the stored result covers the whole task.
  bool full() const noexcept { return kind_ == OutcomeKind::FullReuse; }

 private:
  Outcome(OutcomeKind kind, double fraction, std::optional<ReuseMatch> match)
      : kind_(kind), reused_fraction_(fraction), match_(std::move(match)) {}

  OutcomeKind kind_;
  double reused_fraction_;
  std::optional<ReuseMatch> match_;
};

}  // namespace reuse
