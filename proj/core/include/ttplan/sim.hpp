#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ttplan/flow.hpp"
#include "ttplan/network.hpp"
#include "ttplan/plan.hpp"

namespace ttplan {

// A packet found its output port still transmitting another packet.
struct QueuingViolation {
  Instant time = 0;  // when the packet was ready to transmit
  std::int32_t link = -1;
  FlowId waiting = 0;
  FlowId occupying = 0;
};

// Store-and-forward event simulation of one plan: sources emit at
// t_act + start_offset + k*t_cycle + phi for every send instant below
// t_act + horizon, ports are FIFO, and every busy-port encounter is
// reported (a wait of zero length is not a violation). Independent of the
// schedule arithmetic used by the conflict check.
std::vector<QueuingViolation> simulate_plan(const Network& net,
                                            const std::map<FlowId, Flow>& flows,
                                            const TrafficPlan& plan, Duration horizon);

// 2 hyper-cycles plus the longest end-to-end tail: long enough to align
// every pair of periodic windows at least once.
Duration default_sim_horizon(const Network& net, const std::map<FlowId, Flow>& flows,
                             const TrafficPlan& plan);

struct FlowTransition {
  FlowId flow = 0;
  bool in_old = false;
  bool in_new = false;
  bool reconfigured = false;
  Duration deviation = 0;  // first new delivery minus the old rhythm's slot
  std::int64_t reorder_count = 0;
};

struct TransitionReport {
  std::vector<QueuingViolation> violations;
  std::map<FlowId, FlowTransition> flows;
};

// Replays the old plan long enough to fill the pipeline, switches sources at
// new_plan.t_act, and keeps running until the old packets drain and the new
// schedule completes two hyper-cycles. flows must cover every id in either
// plan. Throws MisalignedActivation unless new_plan.t_act falls on a
// hyper-cycle boundary of the old plan after its activation.
TransitionReport simulate_transition(const Network& net,
                                     const std::map<FlowId, Flow>& flows,
                                     const TrafficPlan& old_plan,
                                     const TrafficPlan& new_plan);

}  // namespace ttplan
