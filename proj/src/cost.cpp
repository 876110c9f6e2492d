#include "reuse/cost.hpp"

#include <stdexcept>

namespace reuse {

double communication_cost(const Task& t, bool at_edge, const CostParams& p) {
  const double data = t.input_size + t.output_size;
  if (at_edge) return data / p.edge_bandwidth + p.edge_hops * p.per_hop_latency;
  return data / p.cloud_bandwidth + p.cloud_hops * p.per_hop_latency;
}

double execution_cost(const Task& t, bool at_edge, const CostParams& p) {
  return t.complexity / (at_edge ? p.edge_capacity_rate : p.cloud_capacity_rate);
}

double reuse_cost(const Task& t, bool full, double remaining_fraction, const CostParams& p) {
  if (!(remaining_fraction >= 0.0 && remaining_fraction <= 1.0))
    throw std::invalid_argument("reuse_cost: remaining_fraction must lie in [0, 1]");
  if (full) {
    if (remaining_fraction != 0.0)
      throw std::invalid_argument("reuse_cost: a full match leaves nothing to compute");
    return p.lookup_cost;
  }
  // The residual sub-task always runs at the edge.
  return p.lookup_cost + remaining_fraction * t.complexity / p.edge_capacity_rate;
}

CostBreakdown completion_cost(const Task& t, const Outcome& o, const CostParams& p) {
  CostBreakdown c;
  c.at_edge = o.at_edge();
  c.full_reuse = o.full();
  c.reused = o.reused();
  c.communication = communication_cost(t, c.at_edge, p);
  c.execution = execution_cost(t, c.at_edge, p);
  c.reuse = c.reused ? reuse_cost(t, c.full_reuse, c.full_reuse ? 0.0 : o.remaining_fraction(), p) : 0.0;
  const double g = c.reused ? 1.0 : 0.0;
  c.total = c.communication + (1.0 - g) * c.execution + g * c.reuse;
  return c;
}

FeasibilityReport check_feasibility(std::span<const Task> edge_tasks, const CostParams& p, double window) {
  if (!(window > 0.0)) throw std::invalid_argument("check_feasibility: window must be > 0");
  double work = 0.0;
  double input = 0.0;
  for (const Task& t : edge_tasks) {
    work += t.complexity;
    input += t.input_size;
  }
  FeasibilityReport r;
  r.compute_ok = work <= p.edge_capacity_rate * window;
  r.bandwidth_ok = input <= p.edge_bandwidth * window;
  r.compute_load = work / (p.edge_capacity_rate * window);
  r.bandwidth_load = input / (p.edge_bandwidth * window);
  return r;
}

}  // namespace reuse
