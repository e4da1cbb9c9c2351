#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttplan/conflict.hpp"
#include "ttplan/flow.hpp"
#include "ttplan/network.hpp"

namespace ttplan {

enum class LockState : std::uint8_t { Unlocked, Transition, Qos, Conservative };

const char* lock_state_name(LockState s);
LockState lock_state_from_name(const std::string& name);

// Stateful walk over a flow's (phi, path) space. Emits all paths for the
// current phi, then advances phi by delta_phi; when the step would leave the
// range the walk restarts at the lowest phase not yet covered. Never emits
// the same pair twice.
class ConfigGenerator {
 public:
  ConfigGenerator(Duration phi_max, std::int32_t n_paths);

  void set_delta_phi(Duration d);
  Duration delta_phi() const { return delta_; }
  bool exhausted() const { return exhausted_; }
  bool first_pass_done() const { return first_pass_done_; }
  std::pair<Duration, std::int32_t> next();
  void disable();  // pinned flows and snapshot-restored graphs stop growing

 private:
  void advance_phi();

  Duration phi_max_;
  std::int32_t n_paths_;
  Duration delta_ = 1;
  Duration cur_phi_ = 0;
  std::int32_t cur_path_ = 0;
  std::vector<bool> covered_;
  Duration covered_count_ = 0;
  Duration lowest_uncovered_ = 0;
  bool first_pass_done_ = false;
  bool exhausted_ = false;
};

using VertexId = std::int32_t;

struct VertexInfo {
  FlowId flow = 0;
  Duration phi = 0;
  std::int32_t path = 0;
  LockState lock = LockState::Unlocked;
  bool alive = false;
  std::vector<VertexId> nbrs;
};

// Undirected vertex-colored conflict graph. Vertices are configurations,
// colors are flows, and an edge exists exactly when two configurations of
// different flows conflict (computed on insertion via configs_conflict).
class ConflictGraph {
 public:
  explicit ConflictGraph(const Network& net) : net_(&net) {
    link_index_.resize(net.link_count());
  }

  const Network& network() const { return *net_; }

  // flows
  void add_flow(const Flow& f);  // registers the flow with no candidates
  bool has_flow(FlowId id) const { return flows_.count(id) != 0; }
  const Flow& flow(FlowId id) const;
  std::vector<FlowId> flow_ids() const;
  std::size_t flow_count() const { return flows_.size(); }
  bool pinned(FlowId id) const;
  ConfigGenerator& generator(FlowId id);

  // candidates
  int insert_config(const Configuration& c);  // returns number of edges added
  std::optional<VertexId> find_vertex(const Configuration& c) const;
  const std::vector<VertexId>& candidates(FlowId id) const;
  int purge_flow(FlowId id);  // returns number of vertices removed

  Duration compute_delta_phi() const;

  struct GrowthResult {
    std::map<FlowId, int> added;
    int total = 0;
  };
  GrowthResult grow_candidates(const std::vector<FlowId>& new_flows,
                               const std::vector<FlowId>& active_flows, int n_ub,
                               bool prev_step_had_rejects);

  // locking
  int apply_reconfiguration_locks(
      const std::map<FlowId, Configuration>& old_plan,
      const std::vector<std::pair<Flow, Configuration>>& removed_old = {});
  int lock_conservative(const std::map<FlowId, Configuration>& old_plan);
  int clear_conservative_locks();
  int clear_temporary_locks();

  int pin_flow(FlowId id, const Configuration& c);  // returns candidates removed

  // views
  const VertexInfo& vertex(VertexId v) const { return verts_.at(v); }
  Configuration vertex_config(VertexId v) const;
  std::size_t vertex_count() const { return alive_count_; }
  std::size_t edge_count() const { return edge_count_; }
  // one past the largest id ever allocated; lets callers build dense arrays
  VertexId vertex_capacity() const { return static_cast<VertexId>(verts_.size()); }

  // snapshot for oracle cross-checks; trusts the edge list as given
  std::string snapshot_json(int indent = 2) const;
  static ConflictGraph from_snapshot_json(const Network& net, const std::string& text);

  // trusted building blocks (snapshot import, synthetic test instances)
  VertexId add_vertex_unchecked(const Configuration& c, LockState lock);
  void add_edge_unchecked(VertexId a, VertexId b);

 private:
  struct FlowEntry {
    Flow flow;
    std::vector<VertexId> cands;
    std::set<std::pair<Duration, std::int32_t>> present;
    ConfigGenerator gen;
    bool pinned = false;
  };

  FlowEntry& entry(FlowId id);
  const FlowEntry& entry(FlowId id) const;
  VertexId alloc_vertex();
  void drop_vertex(VertexId v);

  const Network* net_;
  std::vector<VertexInfo> verts_;
  std::vector<VertexId> free_ids_;
  std::map<FlowId, FlowEntry> flows_;
  std::vector<std::vector<VertexId>> link_index_;
  std::size_t edge_count_ = 0;
  std::size_t alive_count_ = 0;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t cur_stamp_ = 0;
};

}  // namespace ttplan
