#include "reuse/forwarding.hpp"

#include <stdexcept>

namespace reuse {

EdgeNode::EdgeNode(std::set<std::string, std::less<>> offloaded_services, StoreParams store_params,
                   int compute_slots, bool reuse_enabled)
    : offloaded_(std::move(offloaded_services)),
      store_(std::move(store_params)),
      slots_(compute_slots),
      reuse_enabled_(reuse_enabled) {
  if (slots_ < 1) throw std::invalid_argument("edge node needs at least one compute slot");
}

Outcome decide(EdgeNode& node, const TaskView& task, double now) {
  if (!node.offers(task.service)) return Outcome::cloud_offload();
  if (!node.reuse_enabled()) return Outcome::edge_compute();

  const LookupResult found = node.store().lookup(task.service, task.features, now);
  switch (found.kind) {
    case LookupResult::Kind::Full:
      return Outcome::full_reuse(ReuseMatch{found.entry->id, found.entry->output, found.distance});
    case LookupResult::Kind::Partial:
      return Outcome::partial_reuse(ReuseMatch{found.entry->id, found.entry->output, found.distance},
                                    1.0 - found.remaining_fraction);
    case LookupResult::Kind::Miss:
      break;
  }
  return Outcome::edge_compute();
}

void complete(EdgeNode& node, const TaskView& task, const Outcome& outcome, const Output& result, double now) {
  if (!node.reuse_enabled()) return;
  switch (outcome.kind()) {
    case OutcomeKind::EdgeCompute:
    case OutcomeKind::PartialReuse:
      node.store().place(task.service, task.features, result, now);
      break;
    case OutcomeKind::FullReuse:
    case OutcomeKind::CloudOffload:
      break;
  }
}

}  // namespace reuse
