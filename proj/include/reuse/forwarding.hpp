#pragma once

#include <set>
#include <string>
#include <string_view>

#include "reuse/core.hpp"
#include "reuse/reuse_store.hpp"

namespace reuse {

/// An edge server: the services offloaded to it and its Reuse Store Table.
/// With reuse disabled every offloaded task computes from scratch.
class EdgeNode {
 public:
  EdgeNode(std::set<std::string, std::less<>> offloaded_services, StoreParams store_params,
           int compute_slots, bool reuse_enabled = true);

  bool offers(std::string_view service) const { return offloaded_.count(service) != 0; }
  const std::set<std::string, std::less<>>& offloaded_services() const noexcept { return offloaded_; }
  int compute_slots() const noexcept { return slots_; }
  bool reuse_enabled() const noexcept { return reuse_enabled_; }

  ReuseStore& store() noexcept { return store_; }
  const ReuseStore& store() const noexcept { return store_; }

 private:
  std::set<std::string, std::less<>> offloaded_;
  ReuseStore store_;
  int slots_;
  bool reuse_enabled_;
};

/// Forwarding decision for one task: cloud when the service is not offloaded,
/// otherwise full reuse, partial reuse, or computation from scratch according
/// to the store lookup. A hit bumps the matched entry's frequency.
Outcome decide(EdgeNode& node, const TaskView& task, double now);

/// Records a finished task: results computed at the edge (from scratch or as
/// the residual of a partial match) are placed in the store. Full reuse and
/// cloud results are not.
void complete(EdgeNode& node, const TaskView& task, const Outcome& outcome, const Output& result, double now);

}  // namespace reuse
