#pragma once

#include <map>
#include <vector>

#include "ttplan/conflict_graph.hpp"
#include "ttplan/gfh.hpp"

namespace ttplan {

struct ExactResult {
  std::vector<VertexId> selected;  // sorted by vertex id
  std::map<FlowId, Configuration> plan;
  ObjectivePair objective;
};

// Exhaustive reference solver for tiny instances: enumerates independent
// sets with at most one unlocked configuration per flow and returns one
// maximizing (active_admits, new_admits) lexicographically. Deterministic.
// Throws InstanceTooLarge above 25 vertices.
ExactResult exact_best_plan(const ConflictGraph& g, const std::vector<FlowId>& active_flows,
                            const std::vector<FlowId>& new_flows);

}  // namespace ttplan
