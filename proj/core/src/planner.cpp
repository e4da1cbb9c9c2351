#include "ttplan/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>

#include "ttplan/conflict.hpp"
#include "ttplan/error.hpp"

namespace ttplan {

Instant activation_time(const TrafficPlan& prev, const std::map<FlowId, Flow>& prev_flows,
                        Instant ready) {
  if (prev.configs.empty()) return ready;
  Duration cycle = 1;
  for (const auto& [id, c] : prev.configs) {
    auto it = prev_flows.find(id);
    if (it == prev_flows.end())
      throw InternalError("predecessor plan flow " + std::to_string(id) + " unknown");
    cycle = std::lcm(cycle, it->second.t_cycle);
  }
  if (ready <= prev.t_act) return prev.t_act;
  Instant k = ceil_div(ready - prev.t_act, cycle);
  return prev.t_act + k * cycle;
}

Duration source_start_offset(const Flow& f, Duration t_transit) {
  return ceil_div(t_transit, f.t_cycle) * f.t_cycle;
}

Planner::Planner(const Network& net, PlannerConfig cfg)
    : net_(&net), cfg_(std::move(cfg)), graph_(net) {
  if (cfg_.n_path < 1 || cfg_.n_ub < 1 || cfg_.gfh.n_reruns < 0)
    throw InvalidParameters("bad planner configuration");
}

PlanUpdate Planner::process_request(const std::vector<FlowParams>& add,
                                    const std::vector<FlowId>& remove,
                                    std::optional<Instant> ready) {
  // validate the request against the current plan
  std::set<FlowId> remove_set(remove.begin(), remove.end());
  if (remove_set.size() != remove.size())
    throw InvalidParameters("duplicate flow id in removal list");
  for (FlowId id : remove_set)
    if (!plan_.configs.count(id))
      throw UnknownFlow("cannot remove inactive flow " + std::to_string(id));
  std::set<FlowId> add_set;
  for (const FlowParams& p : add) {
    if (!add_set.insert(p.id).second)
      throw DuplicateFlow("flow " + std::to_string(p.id) + " added twice");
    if (plan_.configs.count(p.id) && !remove_set.count(p.id))
      throw DuplicateFlow("flow " + std::to_string(p.id) + " is already active");
  }

  // predecessor snapshot: activation grid and drain tails cover the flows
  // being removed, their packets are still in the network past t_act
  const TrafficPlan prev_plan = plan_;
  const std::map<FlowId, Flow> prev_flows = plan_flows_;
  Duration t_transit = 0;
  for (const auto& [id, c] : prev_plan.configs)
    t_transit = std::max(
        t_transit, transition_interval_length(*net_, prev_flows.at(id), c));

  PlanUpdate update;
  for (FlowId id : remove_set) {
    update.removed.push_back({graph_.flow(id), plan_.configs.at(id)});
    graph_.purge_flow(id);
    plan_.configs.erase(id);
    plan_flows_.erase(id);
    plan_.start_offsets.erase(id);
  }
  // flows rejected in earlier steps were purged then; nothing to clean here

  std::map<FlowId, Configuration> old_plan = plan_.configs;
  std::vector<FlowId> actives;
  for (const auto& [id, c] : old_plan) actives.push_back(id);

  std::vector<FlowId> registered;
  for (const FlowParams& p : add) {
    try {
      graph_.add_flow(register_flow(*net_, p, cfg_.n_path));
      registered.push_back(p.id);
    } catch (const Error& e) {
      update.rejected.push_back({p.id, e.what()});
    }
  }

  GfhResult picked;
  int conservative = 0;
  update.phase = PlanPhase::Defensive;
  if (graph_.flow_count() > 0) {
    Duration delta_phi = graph_.compute_delta_phi();
    for (FlowId id : graph_.flow_ids()) {
      ConfigGenerator& gen = graph_.generator(id);
      if (!gen.exhausted()) gen.set_delta_phi(delta_phi);
    }
    graph_.grow_candidates(registered, actives, cfg_.n_ub, prev_step_had_rejects_);
    graph_.apply_reconfiguration_locks(old_plan, update.removed);

    conservative = graph_.lock_conservative(old_plan);
    GfhResult phase1 = run_gfh(graph_, actives, registered, cfg_.gfh);
    update.gfh_runs = phase1.runs;
    picked = phase1;

    if (!phase1.all_admitted && cfg_.offensive && conservative > 0) {
      graph_.clear_conservative_locks();
      GfhResult phase2 = run_gfh(graph_, actives, registered, cfg_.gfh);
      update.gfh_runs += phase2.runs;
      bool actives_kept =
          phase2.objective.active_admits == static_cast<std::int64_t>(actives.size());
      if (actives_kept && phase2.objective > phase1.objective) {
        picked = phase2;
        update.phase = PlanPhase::Offensive;
      } else {
        update.phase = PlanPhase::Reverted;
      }
    }
  }

  // assemble the successor plan
  TrafficPlan next;
  next.version = prev_plan.version + 1;
  next.t0 = prev_plan.t_act;
  next.configs = picked.plan;
  Instant ready_at =
      ready ? *ready : (prev_plan.version == 0 ? 0 : prev_plan.t_act + 1);
  next.t_act = activation_time(prev_plan, prev_flows, ready_at);

  for (FlowId id : actives) {
    if (!next.configs.count(id))
      throw InternalError("active flow " + std::to_string(id) + " evicted");
    const Configuration& now = next.configs.at(id);
    const Configuration& before = old_plan.at(id);
    if (!(now == before)) {
      Duration dt = reconfig_jitter(*net_, graph_.flow(id), before, now);
      if (std::llabs(dt) > graph_.flow(id).dt_limit)
        throw InternalError("reconfiguration exceeds the flow's jitter budget");
      update.reconfigured.push_back({id, dt});
    }
  }
  for (FlowId id : registered) {
    if (next.configs.count(id)) {
      update.admitted_new.push_back(id);
      next.start_offsets[id] = source_start_offset(graph_.flow(id), t_transit);
    } else {
      update.rejected.push_back({id, "no conflict-free configuration found"});
    }
  }

  graph_.clear_temporary_locks();
  for (FlowId id : update.admitted_new)
    if (graph_.flow(id).pin_on_admit) graph_.pin_flow(id, next.configs.at(id));
  bool admission_rejects = false;
  for (FlowId id : registered) {
    if (!next.configs.count(id)) {
      graph_.purge_flow(id);
      admission_rejects = true;
    }
  }
  prev_step_had_rejects_ = admission_rejects;

  plan_flows_.clear();
  for (const auto& [id, c] : next.configs) plan_flows_[id] = graph_.flow(id);
  plan_ = next;

  std::sort(update.rejected.begin(), update.rejected.end(),
            [](const RejectedFlow& a, const RejectedFlow& b) { return a.id < b.id; });
  std::sort(update.removed.begin(), update.removed.end(),
            [](const auto& a, const auto& b) { return a.first.id < b.first.id; });
  update.plan = plan_;
  update.flows = plan_flows_;
  update.graph_vertices = graph_.vertex_count();
  update.graph_edges = graph_.edge_count();
  return update;
}

}  // namespace ttplan
