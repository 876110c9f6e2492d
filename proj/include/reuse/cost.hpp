#pragma once

#include <span>

#include "reuse/core.hpp"

namespace reuse {

/// Completion cost of one task, all components in seconds.
struct CostBreakdown {
  double communication = 0.0;  // Gamma(t)
  double execution = 0.0;      // chi(t)
  double reuse = 0.0;          // eta(t)
  double total = 0.0;          // zeta_t
  bool at_edge = false;        // x_t^e
  bool full_reuse = false;     // r_t
  bool reused = false;         // gamma_t
};

/// (I + O) / b plus the hop latency of the chosen path.
double communication_cost(const Task& t, bool at_edge, const CostParams& p);

/// F / f on the chosen side.
double execution_cost(const Task& t, bool at_edge, const CostParams& p);

/// L for a full match; L plus edge execution of the residual share otherwise.
/// Throws std::invalid_argument for a full match with a nonzero residual or a
/// residual outside [0, 1].
double reuse_cost(const Task& t, bool full, double remaining_fraction, const CostParams& p);

/// zeta = Gamma + (1 - gamma) chi + gamma eta.
CostBreakdown completion_cost(const Task& t, const Outcome& o, const CostParams& p);

struct FeasibilityReport {
  bool compute_ok = true;
  bool bandwidth_ok = true;
  double compute_load = 0.0;    // sum F / (f^e * window)
  double bandwidth_load = 0.0;  // sum I / (b^e * window)
};

/// Checks the edge compute and uplink budgets over `window` seconds for the
/// tasks assigned to the edge. Bounds are inclusive.
FeasibilityReport check_feasibility(std::span<const Task> edge_tasks, const CostParams& p, double window);

}  // namespace reuse
