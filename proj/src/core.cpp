#include "reuse/core.hpp"

#include <cmath>
#include <string>

namespace reuse {

DimensionMismatch::DimensionMismatch(Eigen::Index expected, Eigen::Index actual)
    : std::invalid_argument("feature dimension mismatch: expected " + std::to_string(expected) +
                            ", got " + std::to_string(actual)),
      expected_(expected),
      actual_(actual) {}

void validate_features(const FeatureVector& v, std::optional<Eigen::Index> dimension) {
  if (v.size() < 1) throw std::invalid_argument("feature vector must have dimension >= 1");
  if (dimension && v.size() != *dimension) throw DimensionMismatch(*dimension, v.size());
  if (!v.allFinite()) throw std::invalid_argument("feature vector has non-finite values");
}

void validate(const Task& t) {
  validate_features(t.features);
  if (!(t.input_size >= 0.0)) throw std::invalid_argument("task input_size must be >= 0");
  if (!(t.output_size >= 0.0)) throw std::invalid_argument("task output_size must be >= 0");
  if (!(t.complexity > 0.0)) throw std::invalid_argument("task complexity must be > 0");
  if (!(t.arrival_time >= 0.0)) throw std::invalid_argument("task arrival_time must be >= 0");
}

void validate(const CostParams& p) {
  if (!(p.edge_bandwidth > 0.0)) throw std::invalid_argument("edge_bandwidth must be > 0");
  if (!(p.cloud_bandwidth > 0.0)) throw std::invalid_argument("cloud_bandwidth must be > 0");
  if (!(p.edge_capacity_rate > 0.0)) throw std::invalid_argument("edge_capacity_rate must be > 0");
  if (!(p.cloud_capacity_rate > 0.0)) throw std::invalid_argument("cloud_capacity_rate must be > 0");
  if (!(p.lookup_cost >= 0.0)) throw std::invalid_argument("lookup_cost must be >= 0");
  if (!(p.per_hop_latency >= 0.0)) throw std::invalid_argument("per_hop_latency must be >= 0");
  if (p.edge_hops < 1) throw std::invalid_argument("edge_hops must be >= 1");
  if (p.cloud_hops < p.edge_hops) throw std::invalid_argument("cloud_hops must be >= edge_hops");
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::FullReuse: return "full_reuse";
    case OutcomeKind::PartialReuse: return "partial_reuse";
    case OutcomeKind::EdgeCompute: return "edge_compute";
    case OutcomeKind::CloudOffload: return "cloud_offload";
  }
  return "unknown";
}

Outcome Outcome::full_reuse(ReuseMatch match) {
  return Outcome(OutcomeKind::FullReuse, 1.0, std::move(match));
}

Outcome Outcome::partial_reuse(ReuseMatch match, double reused_fraction) {
  if (!(reused_fraction > 0.0 && reused_fraction < 1.0))
    throw std::invalid_argument("partial reuse fraction must lie in (0, 1)");
  return Outcome(OutcomeKind::PartialReuse, reused_fraction, std::move(match));
}

Outcome Outcome::edge_compute() { return Outcome(OutcomeKind::EdgeCompute, 0.0, std::nullopt); }

Outcome Outcome::cloud_offload() { return Outcome(OutcomeKind::CloudOffload, 0.0, std::nullopt); }

}  // namespace reuse
