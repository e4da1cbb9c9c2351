#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ttplan/conflict_graph.hpp"
#include "ttplan/flow.hpp"

namespace ttplan {

// Admission counts, compared lexicographically: keeping one more active flow
// outweighs admitting any number of new ones.
struct ObjectivePair {
  std::int64_t active_admits = 0;
  std::int64_t new_admits = 0;

  friend auto operator<=>(const ObjectivePair&, const ObjectivePair&) = default;
};

struct GfhParams {
  double alpha = 1000.0;  // rating penalty for wiping out a flow's last option
  int n_reruns = 3;
};

// One pass of the greedy selection over a fixed graph + lock state. Exposed
// for testing; run_gfh drives it.
class GfhRun {
 public:
  explicit GfhRun(const ConflictGraph& g, double alpha = 1000.0);

  // Seeds C with every unlocked vertex that has no unlocked neighbor.
  void solitary_init();

  // Builds a min-heap over the given flows (eligible count asc, total degree
  // of eligible candidates desc, flow id asc) and pops until empty, each pop
  // committing the flow's best-rated eligible candidate. Flows with no
  // eligible candidate left at pop time stay unadmitted.
  void add_config_per_flow(const std::vector<FlowId>& search);

  // Sum over the flows owning eligible neighbors of v: the share of that
  // flow's eligible candidates v would shadow, or alpha when the share is 1.
  double shadow_rating(VertexId v) const;

  bool eligible(VertexId v) const;
  std::int64_t eligible_count(FlowId f) const;
  bool admitted(FlowId f) const;
  bool in_c(VertexId v) const { return in_c_[v]; }
  bool shadowed(VertexId v) const { return shadowed_[v]; }
  std::vector<VertexId> selected() const;  // C, sorted by vertex id

 private:
  std::int64_t degree_sum(FlowId f) const;
  void commit(VertexId v);

  const ConflictGraph* g_;
  double alpha_;
  std::vector<char> in_c_;
  std::vector<char> shadowed_;
  std::map<FlowId, std::int64_t> eligible_;
  std::map<FlowId, char> admitted_;
  std::vector<VertexId> c_;
};

struct GfhResult {
  std::vector<VertexId> selected;        // best C seen, sorted by vertex id
  std::map<FlowId, Configuration> plan;  // smallest (phi, path) per admitted flow
  ObjectivePair objective;
  ObjectivePair first_run_objective;
  int runs = 1;
  bool all_admitted = false;
};

ObjectivePair objective_value(const std::map<FlowId, Configuration>& plan,
                              const std::vector<FlowId>& active_flows,
                              const std::vector<FlowId>& new_flows);

// Run 1 processes actives then new flows. While some flow stays unadmitted
// and re-runs remain, the flows are re-processed in four groups split by the
// previous run's outcome: unadmitted actives, admitted actives, unadmitted
// new, admitted new. Returns the run with the highest objective.
GfhResult run_gfh(const ConflictGraph& g, const std::vector<FlowId>& active_flows,
                  const std::vector<FlowId>& new_flows, const GfhParams& params = {});

}  // namespace ttplan
