#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ttplan/conflict_graph.hpp"
#include "ttplan/gfh.hpp"
#include "ttplan/plan.hpp"

namespace ttplan {

struct PlannerConfig {
  int n_path = 3;  // candidate paths per flow
  int n_ub = 50;   // per-flow candidate growth cap per step
  GfhParams gfh;
  bool offensive = true;  // false: stop after the conservative phase
};

// Smallest hyper-cycle boundary of the predecessor plan at or after ready.
// An empty predecessor imposes no grid and activation happens at ready.
Instant activation_time(const TrafficPlan& prev, const std::map<FlowId, Flow>& prev_flows,
                        Instant ready);

// Send offset for a freshly admitted flow so its first packet enters the
// network only after the longest predecessor drain tail has cleared.
Duration source_start_offset(const Flow& f, Duration t_transit);

// Keeps the conflict graph and current plan across processing steps. Each
// step handles removals and additions as one transaction: grow candidates,
// lock configurations that would disturb the transition, then search first
// with every active flow held to its current configuration and, if that
// rejects anything, once more with those holds lifted.
class Planner {
 public:
  explicit Planner(const Network& net, PlannerConfig cfg = {});

  PlanUpdate process_request(const std::vector<FlowParams>& add,
                             const std::vector<FlowId>& remove = {},
                             std::optional<Instant> ready = std::nullopt);

  const TrafficPlan& plan() const { return plan_; }
  const ConflictGraph& graph() const { return graph_; }
  const Network& network() const { return *net_; }
  bool prev_step_had_rejects() const { return prev_step_had_rejects_; }

 private:
  const Network* net_;
  PlannerConfig cfg_;
  ConflictGraph graph_;
  TrafficPlan plan_;
  std::map<FlowId, Flow> plan_flows_;
  bool prev_step_had_rejects_ = false;
};

}  // namespace ttplan
