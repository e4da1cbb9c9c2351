#include "ttplan/conflict_graph.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "ttplan/error.hpp"

namespace ttplan {

const char* lock_state_name(LockState s) {
  switch (s) {
    case LockState::Unlocked: return "unlocked";
    case LockState::Transition: return "transition";
    case LockState::Qos: return "qos";
    case LockState::Conservative: return "conservative";
  }
  return "?";
}

LockState lock_state_from_name(const std::string& name) {
  if (name == "unlocked") return LockState::Unlocked;
  if (name == "transition") return LockState::Transition;
  if (name == "qos") return LockState::Qos;
  if (name == "conservative") return LockState::Conservative;
  throw MalformedInput("unknown lock state: " + name);
}

ConfigGenerator::ConfigGenerator(Duration phi_max, std::int32_t n_paths)
    : phi_max_(phi_max), n_paths_(n_paths) {
  if (phi_max < 0 || n_paths < 1) throw InvalidParameters("bad generator range");
  covered_.assign(static_cast<std::size_t>(phi_max) + 1, false);
}

void ConfigGenerator::set_delta_phi(Duration d) {
  if (d < 1) throw InvalidParameters("delta_phi must be >= 1");
  delta_ = d;
}

void ConfigGenerator::disable() {
  exhausted_ = true;
  first_pass_done_ = true;
}

std::pair<Duration, std::int32_t> ConfigGenerator::next() {
  if (exhausted_) throw InternalError("generator exhausted");
  std::pair<Duration, std::int32_t> out{cur_phi_, cur_path_};
  if (++cur_path_ == n_paths_) {
    covered_[cur_phi_] = true;
    ++covered_count_;
    cur_path_ = 0;
    if (covered_count_ == phi_max_ + 1) {
      exhausted_ = true;
      first_pass_done_ = true;
    } else {
      advance_phi();
    }
  }
  return out;
}

void ConfigGenerator::advance_phi() {
  Duration next = cur_phi_ + delta_;
  while (next <= phi_max_ && covered_[next]) next += delta_;
  if (next > phi_max_) {
    first_pass_done_ = true;
    while (covered_[lowest_uncovered_]) ++lowest_uncovered_;
    next = lowest_uncovered_;
  }
  cur_phi_ = next;
}

ConflictGraph::FlowEntry& ConflictGraph::entry(FlowId id) {
  auto it = flows_.find(id);
  if (it == flows_.end()) throw UnknownFlow("flow " + std::to_string(id) + " not in graph");
  return it->second;
}

const ConflictGraph::FlowEntry& ConflictGraph::entry(FlowId id) const {
  auto it = flows_.find(id);
  if (it == flows_.end()) throw UnknownFlow("flow " + std::to_string(id) + " not in graph");
  return it->second;
}

void ConflictGraph::add_flow(const Flow& f) {
  if (flows_.count(f.id)) throw DuplicateFlow("flow " + std::to_string(f.id) + " already in graph");
  PhaseRange r = phase_range(f);
  flows_.emplace(f.id, FlowEntry{f, {}, {}, ConfigGenerator(r.hi, static_cast<std::int32_t>(f.paths.size())), false});
}

const Flow& ConflictGraph::flow(FlowId id) const { return entry(id).flow; }

std::vector<FlowId> ConflictGraph::flow_ids() const {
  std::vector<FlowId> out;
  out.reserve(flows_.size());
  for (const auto& [id, e] : flows_) out.push_back(id);
  return out;
}

bool ConflictGraph::pinned(FlowId id) const { return entry(id).pinned; }

ConfigGenerator& ConflictGraph::generator(FlowId id) { return entry(id).gen; }

VertexId ConflictGraph::alloc_vertex() {
  if (!free_ids_.empty()) {
    VertexId v = free_ids_.back();
    free_ids_.pop_back();
    return v;
  }
  verts_.emplace_back();
  stamp_.push_back(0);
  return static_cast<VertexId>(verts_.size() - 1);
}

void ConflictGraph::drop_vertex(VertexId v) {
  VertexInfo& rec = verts_[v];
  for (VertexId u : rec.nbrs) {
    auto& un = verts_[u].nbrs;
    un.erase(std::find(un.begin(), un.end(), v));
    --edge_count_;
  }
  rec.nbrs.clear();
  rec.alive = false;
  --alive_count_;
  free_ids_.push_back(v);
  // link_index_ entries are cleaned lazily during scans
}

Configuration ConflictGraph::vertex_config(VertexId v) const {
  const VertexInfo& rec = verts_.at(v);
  return Configuration{rec.flow, rec.phi, rec.path};
}

int ConflictGraph::insert_config(const Configuration& c) {
  FlowEntry& e = entry(c.flow);
  if (e.pinned) throw InvalidParameters("flow " + std::to_string(c.flow) + " is pinned");
  if (c.path < 0 || c.path >= static_cast<std::int32_t>(e.flow.paths.size()))
    throw InvalidParameters("path index out of range");
  PhaseRange r = phase_range(e.flow);
  if (c.phi < r.lo || c.phi > r.hi) throw InvalidParameters("phi outside phase range");
  if (!e.present.insert({c.phi, c.path}).second)
    throw DuplicateConfiguration("configuration already present");

  VertexId v = alloc_vertex();
  VertexInfo& rec = verts_[v];
  rec.flow = c.flow;
  rec.phi = c.phi;
  rec.path = c.path;
  rec.lock = LockState::Unlocked;
  rec.alive = true;
  ++alive_count_;

  // conflict checks against configurations sharing at least one link
  ++cur_stamp_;
  stamp_[v] = cur_stamp_;
  int added = 0;
  const Path& path = e.flow.paths[c.path];
  for (std::int32_t link : path.links) {
    auto& bucket = link_index_[link];
    std::size_t dead = 0;
    for (VertexId u : bucket) {
      if (!verts_[u].alive) {
        ++dead;
        continue;
      }
      if (stamp_[u] == cur_stamp_) continue;
      stamp_[u] = cur_stamp_;
      const VertexInfo& urec = verts_[u];
      if (urec.flow == c.flow) continue;
      const FlowEntry& ue = entry(urec.flow);
      if (configs_conflict(*net_, e.flow, c, ue.flow,
                           Configuration{urec.flow, urec.phi, urec.path})) {
        rec.nbrs.push_back(u);
        verts_[u].nbrs.push_back(v);
        ++edge_count_;
        ++added;
      }
    }
    if (dead * 4 > bucket.size()) {
      std::erase_if(bucket, [&](VertexId u) { return !verts_[u].alive; });
    }
    bucket.push_back(v);
  }
  e.cands.push_back(v);
  return added;
}

std::optional<VertexId> ConflictGraph::find_vertex(const Configuration& c) const {
  auto it = flows_.find(c.flow);
  if (it == flows_.end()) return std::nullopt;
  for (VertexId v : it->second.cands) {
    const VertexInfo& rec = verts_[v];
    if (rec.phi == c.phi && rec.path == c.path) return v;
  }
  return std::nullopt;
}

const std::vector<VertexId>& ConflictGraph::candidates(FlowId id) const {
  return entry(id).cands;
}

int ConflictGraph::purge_flow(FlowId id) {
  FlowEntry& e = entry(id);
  int removed = static_cast<int>(e.cands.size());
  for (VertexId v : e.cands) drop_vertex(v);
  flows_.erase(id);
  return removed;
}

Duration ConflictGraph::compute_delta_phi() const {
  if (flows_.empty()) throw EmptyGraph("delta_phi undefined on an empty graph");
  std::vector<Duration> values;
  values.reserve(flows_.size());
  for (const auto& [id, e] : flows_) values.push_back(e.flow.t_trans);
  std::sort(values.begin(), values.end());
  // nearest-rank 75th percentile: element at rank ceil(0.75 * N), 1-indexed
  std::size_t rank = (values.size() * 3 + 3) / 4;
  return std::max<Duration>(1, values[rank - 1]);
}

ConflictGraph::GrowthResult ConflictGraph::grow_candidates(
    const std::vector<FlowId>& new_flows, const std::vector<FlowId>& active_flows,
    int n_ub, bool prev_step_had_rejects) {
  GrowthResult result;
  auto grow_one = [&](FlowId id, bool stop_at_first_pass) {
    FlowEntry& e = entry(id);
    int added = 0;
    while (added < n_ub && !e.gen.exhausted()) {
      if (stop_at_first_pass && e.gen.first_pass_done()) break;
      auto [phi, path] = e.gen.next();
      insert_config(Configuration{id, phi, path});
      ++added;
    }
    if (added > 0) result.added[id] = added;
    result.total += added;
  };

  std::vector<FlowId> sorted_new = new_flows;
  std::sort(sorted_new.begin(), sorted_new.end());
  for (FlowId id : sorted_new) grow_one(id, false);

  std::vector<FlowId> sorted_active = active_flows;
  std::sort(sorted_active.begin(), sorted_active.end());
  for (FlowId id : sorted_active) {
    if (entry(id).pinned) continue;
    grow_one(id, !prev_step_had_rejects);
  }
  return result;
}

int ConflictGraph::apply_reconfiguration_locks(
    const std::map<FlowId, Configuration>& old_plan,
    const std::vector<std::pair<Flow, Configuration>>& removed_old) {
  int locked = 0;
  auto lock_vertex = [&](VertexId v) {
    VertexInfo& rec = verts_[v];
    if (rec.lock == LockState::Unlocked) {
      rec.lock = LockState::Transition;
      ++locked;
      return true;
    }
    return false;
  };

  for (const auto& [fid, cur] : old_plan) {
    FlowEntry& e = entry(fid);
    auto v_cur = find_vertex(cur);
    if (!v_cur) throw InternalError("active flow's current configuration missing from graph");

    // own candidates: packets of the old version still in flight at the
    // boundary must not collide with the candidate's first packets; within
    // the jitter budget otherwise
    for (VertexId v : e.cands) {
      if (v == *v_cur) continue;  // the current configuration is never locked
      VertexInfo& rec = verts_[v];
      if (rec.lock != LockState::Unlocked) continue;
      Configuration cand{fid, rec.phi, rec.path};
      if (transition_interference(*net_, e.flow, cur, e.flow, cand)) {
        rec.lock = LockState::Transition;
        ++locked;
      } else if (std::llabs(reconfig_jitter(*net_, e.flow, cur, cand)) > e.flow.dt_limit) {
        rec.lock = LockState::Qos;
        ++locked;
      }
    }

    // 1-hop neighbors of the current configuration owned by other active
    // flows: their first new-version packets must clear this flow's drain
    for (VertexId u : verts_[*v_cur].nbrs) {
      const VertexInfo& urec = verts_[u];
      auto it = old_plan.find(urec.flow);
      if (it == old_plan.end()) continue;  // postponement protects new flows
      Configuration cand{urec.flow, urec.phi, urec.path};
      if (transition_interference(*net_, e.flow, cur, entry(urec.flow).flow, cand))
        lock_vertex(u);
    }
  }

  // flows leaving the plan still drain past the boundary; their vertices are
  // already purged, so check the remaining flows' candidates directly
  for (const auto& [rflow, rcfg] : removed_old) {
    for (const auto& [fid, cur] : old_plan) {
      FlowEntry& e = entry(fid);
      for (VertexId v : e.cands) {
        VertexInfo& rec = verts_[v];
        if (rec.lock != LockState::Unlocked) continue;
        if (rec.phi == cur.phi && rec.path == cur.path) continue;
        Configuration cand{fid, rec.phi, rec.path};
        if (transition_interference(*net_, rflow, rcfg, e.flow, cand)) {
          rec.lock = LockState::Transition;
          ++locked;
        }
      }
    }
  }
  return locked;
}

int ConflictGraph::lock_conservative(const std::map<FlowId, Configuration>& old_plan) {
  int locked = 0;
  for (const auto& [fid, cur] : old_plan) {
    FlowEntry& e = entry(fid);
    for (VertexId v : e.cands) {
      VertexInfo& rec = verts_[v];
      if (rec.phi == cur.phi && rec.path == cur.path) continue;
      if (rec.lock == LockState::Unlocked) {
        rec.lock = LockState::Conservative;
        ++locked;
      }
    }
  }
  return locked;
}

int ConflictGraph::clear_conservative_locks() {
  int cleared = 0;
  for (auto& rec : verts_) {
    if (rec.alive && rec.lock == LockState::Conservative) {
      rec.lock = LockState::Unlocked;
      ++cleared;
    }
  }
  return cleared;
}

int ConflictGraph::clear_temporary_locks() {
  int cleared = 0;
  for (auto& rec : verts_) {
    if (rec.alive && rec.lock != LockState::Unlocked) {
      rec.lock = LockState::Unlocked;
      ++cleared;
    }
  }
  return cleared;
}

int ConflictGraph::pin_flow(FlowId id, const Configuration& c) {
  FlowEntry& e = entry(id);
  auto v_keep = find_vertex(c);
  if (!v_keep) throw InvalidParameters("pin_flow: configuration is not a candidate");
  if (e.pinned) return 0;
  int removed = 0;
  std::vector<VertexId> others;
  for (VertexId v : e.cands)
    if (v != *v_keep) others.push_back(v);
  for (VertexId v : others) {
    e.present.erase({verts_[v].phi, verts_[v].path});
    drop_vertex(v);
    ++removed;
  }
  e.cands.assign(1, *v_keep);
  e.pinned = true;
  e.gen.disable();
  return removed;
}

std::string ConflictGraph::snapshot_json(int indent) const {
  nlohmann::json j;
  j["flows"] = nlohmann::json::array();
  for (const auto& [id, e] : flows_) {
    nlohmann::json jf;
    jf["id"] = id;
    jf["src"] = net_->node_id(e.flow.src);
    jf["dst"] = net_->node_id(e.flow.dst);
    jf["t_trans"] = e.flow.t_trans;
    jf["t_cycle"] = e.flow.t_cycle;
    jf["deadline"] = e.flow.deadline;
    jf["dt_limit"] = e.flow.dt_limit;
    jf["pin_on_admit"] = e.flow.pin_on_admit;
    jf["pinned"] = e.pinned;
    jf["paths"] = nlohmann::json::array();
    for (const Path& p : e.flow.paths) {
      nlohmann::json jp = nlohmann::json::array();
      for (std::int32_t n : p.nodes) jp.push_back(net_->node_id(n));
      jf["paths"].push_back(jp);
    }
    j["flows"].push_back(jf);
  }

  std::vector<VertexId> order;
  for (const auto& [id, e] : flows_)
    for (VertexId v : e.cands) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    const auto& ra = verts_[a];
    const auto& rb = verts_[b];
    return std::tie(ra.flow, ra.phi, ra.path) < std::tie(rb.flow, rb.phi, rb.path);
  });
  std::vector<std::int32_t> pos(verts_.size(), -1);
  j["vertices"] = nlohmann::json::array();
  for (std::size_t i = 0; i < order.size(); ++i) {
    pos[order[i]] = static_cast<std::int32_t>(i);
    const auto& rec = verts_[order[i]];
    j["vertices"].push_back({{"flow", rec.flow},
                             {"phi", rec.phi},
                             {"path", rec.path},
                             {"lock", lock_state_name(rec.lock)}});
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (VertexId v : order)
    for (VertexId u : verts_[v].nbrs)
      if (pos[v] < pos[u]) edges.push_back({pos[v], pos[u]});
  std::sort(edges.begin(), edges.end());
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : edges) j["edges"].push_back({a, b});
  return j.dump(indent);
}

ConflictGraph ConflictGraph::from_snapshot_json(const Network& net, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("snapshot JSON: ") + e.what());
  }
  ConflictGraph g(net);
  try {
    for (const auto& jf : j.at("flows")) {
      Flow f;
      f.id = jf.at("id").get<FlowId>();
      f.src = net.node_index(jf.at("src").get<std::string>());
      f.dst = net.node_index(jf.at("dst").get<std::string>());
      f.t_trans = jf.at("t_trans").get<Duration>();
      f.t_cycle = jf.at("t_cycle").get<Duration>();
      f.deadline = jf.at("deadline").get<Duration>();
      f.dt_limit = jf.at("dt_limit").get<Duration>();
      f.pin_on_admit = jf.value("pin_on_admit", false);
      for (const auto& jp : jf.at("paths")) {
        Path p;
        for (const auto& jn : jp) p.nodes.push_back(net.node_index(jn.get<std::string>()));
        for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
          auto l = net.link_between(p.nodes[i], p.nodes[i + 1]);
          if (!l) throw MalformedInput("snapshot path uses a missing link");
          p.links.push_back(*l);
        }
        for (std::int32_t n : p.nodes)
          if (net.role(n) == NodeRole::Infrastructure) ++p.infra_hops;
        p.index = static_cast<std::int32_t>(f.paths.size());
        f.paths.push_back(std::move(p));
      }
      g.add_flow(f);
      if (jf.value("pinned", false)) g.entry(f.id).pinned = true;
    }
    std::vector<VertexId> by_pos;
    for (const auto& jv : j.at("vertices")) {
      Configuration c{jv.at("flow").get<FlowId>(), jv.at("phi").get<Duration>(),
                      jv.at("path").get<std::int32_t>()};
      by_pos.push_back(
          g.add_vertex_unchecked(c, lock_state_from_name(jv.at("lock").get<std::string>())));
    }
    for (const auto& je : j.at("edges"))
      g.add_edge_unchecked(by_pos.at(je.at(0).get<std::size_t>()),
                           by_pos.at(je.at(1).get<std::size_t>()));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("snapshot JSON: ") + e.what());
  } catch (const MalformedInput&) {
    throw;
  } catch (const Error& e) {
    throw MalformedInput(std::string("snapshot JSON: ") + e.what());
  }
  // snapshots capture structure for cross-checks; restored graphs do not grow
  for (auto& [id, e] : g.flows_) e.gen.disable();
  return g;
}

VertexId ConflictGraph::add_vertex_unchecked(const Configuration& c, LockState lock) {
  FlowEntry& e = entry(c.flow);
  if (c.path < 0 || c.path >= static_cast<std::int32_t>(e.flow.paths.size()))
    throw InvalidParameters("path index out of range");
  if (!e.present.insert({c.phi, c.path}).second)
    throw DuplicateConfiguration("configuration already present");
  VertexId v = alloc_vertex();
  VertexInfo& rec = verts_[v];
  rec.flow = c.flow;
  rec.phi = c.phi;
  rec.path = c.path;
  rec.lock = lock;
  rec.alive = true;
  ++alive_count_;
  for (std::int32_t link : e.flow.paths[c.path].links) link_index_[link].push_back(v);
  e.cands.push_back(v);
  return v;
}

void ConflictGraph::add_edge_unchecked(VertexId a, VertexId b) {
  if (a == b || verts_.at(a).flow == verts_.at(b).flow)
    throw InvalidParameters("edges connect configurations of different flows");
  verts_[a].nbrs.push_back(b);
  verts_[b].nbrs.push_back(a);
  ++edge_count_;
}

}  // namespace ttplan
