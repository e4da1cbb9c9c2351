#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ttplan/flow.hpp"
#include "ttplan/network.hpp"

namespace ttplan {

// One configuration per admitted flow, pairwise conflict-free, activated at
// t_act. t_act - t0 is a multiple of the predecessor plan's hyper-cycle
// (t0 is the predecessor's activation instant).
struct TrafficPlan {
  std::int64_t version = 0;
  Instant t0 = 0;
  Instant t_act = 0;
  std::map<FlowId, Configuration> configs;
  std::map<FlowId, Duration> start_offsets;  // admitted-new flows; absent = 0

  Duration start_offset(FlowId f) const {
    auto it = start_offsets.find(f);
    return it == start_offsets.end() ? 0 : it->second;
  }
};

enum class PlanPhase : std::uint8_t { Defensive, Offensive, Reverted };

const char* plan_phase_name(PlanPhase p);

struct RejectedFlow {
  FlowId id = 0;
  std::string reason;
};

struct ReconfiguredFlow {
  FlowId id = 0;
  Duration delta_t = 0;
};

struct PlanUpdate {
  TrafficPlan plan;
  std::map<FlowId, Flow> flows;  // parameters of every flow in the plan
  std::vector<FlowId> admitted_new;
  std::vector<RejectedFlow> rejected;
  std::vector<ReconfiguredFlow> reconfigured;
  std::vector<std::pair<Flow, Configuration>> removed;  // dropped this step
  PlanPhase phase = PlanPhase::Defensive;
  std::size_t graph_vertices = 0;
  std::size_t graph_edges = 0;
  int gfh_runs = 0;
};

// Per-node dissemination records. Infrastructure nodes get a route entry and
// the reserved transmission windows of their outgoing link, folded into
// [0, t_cycle) (a wrapping window splits in two). Source hosts get the send
// phase and first activation instant. A node still carrying the previous
// version of a reconfigured flow holds both record sets, told apart by the
// version tag.
struct RouteRecord {
  FlowId flow = 0;
  std::int64_t version = 0;
  std::int32_t in_link = -1;
  std::int32_t out_link = -1;
};

struct WindowRecord {
  FlowId flow = 0;
  std::int64_t version = 0;
  std::int32_t link = -1;
  Duration start = 0;
  Duration length = 0;
  Duration t_cycle = 0;
};

struct SourceRecord {
  FlowId flow = 0;
  std::int64_t version = 0;
  Duration phi = 0;
  Duration t_cycle = 0;
  Instant first_activation = 0;
};

struct NodeSubplan {
  std::int32_t node = -1;
  std::vector<RouteRecord> routes;
  std::vector<WindowRecord> windows;
  std::vector<SourceRecord> sources;
};

std::vector<NodeSubplan> emit_subplans(const Network& net,
                                       const std::map<FlowId, Flow>& flows,
                                       const TrafficPlan& plan,
                                       const TrafficPlan* prev = nullptr,
                                       const std::map<FlowId, Flow>* prev_flows = nullptr);

// {"activation_time", "flows" [{id, phi, path, start_offset, reconfigured,
// delta_t}], "subplans"}; deterministic key and element order.
std::string plan_json(const Network& net, const std::map<FlowId, Flow>& flows,
                      const TrafficPlan& plan, const TrafficPlan* prev = nullptr,
                      const std::map<FlowId, Flow>* prev_flows = nullptr, int indent = 2);

}  // namespace ttplan
