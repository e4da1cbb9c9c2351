#include "ttplan/plan.hpp"

#include <algorithm>

#include <json.hpp>

#include "ttplan/conflict.hpp"
#include "ttplan/error.hpp"

namespace ttplan {

const char* plan_phase_name(PlanPhase p) {
  switch (p) {
    case PlanPhase::Defensive: return "defensive";
    case PlanPhase::Offensive: return "offensive";
    case PlanPhase::Reverted: return "reverted";
  }
  return "?";
}

namespace {

const Flow& flow_of(const std::map<FlowId, Flow>& flows, FlowId id) {
  auto it = flows.find(id);
  if (it == flows.end())
    throw InternalError("plan references flow " + std::to_string(id) + " with no parameters");
  return it->second;
}

void emit_flow(const Network& net, const Flow& f, const Configuration& c,
               std::int64_t version, Instant first_activation,
               std::map<std::int32_t, NodeSubplan>& nodes, bool with_source) {
  const Path& p = f.paths.at(c.path);
  Duration hop = net.per_hop_delay(f.t_trans);
  if (with_source) {
    NodeSubplan& src = nodes[p.nodes.front()];
    src.sources.push_back({f.id, version, c.phi, f.t_cycle, first_activation});
  }
  for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
    NodeSubplan& n = nodes[p.nodes[i]];
    n.routes.push_back({f.id, version, p.links[i - 1], p.links[i]});
    Duration start = pos_mod(c.phi + static_cast<Duration>(i) * hop, f.t_cycle);
    if (start + f.t_trans <= f.t_cycle) {
      n.windows.push_back({f.id, version, p.links[i], start, f.t_trans, f.t_cycle});
    } else {
      Duration head = f.t_cycle - start;
      n.windows.push_back({f.id, version, p.links[i], start, head, f.t_cycle});
      n.windows.push_back({f.id, version, p.links[i], 0, f.t_trans - head, f.t_cycle});
    }
  }
}

}  // namespace

std::vector<NodeSubplan> emit_subplans(const Network& net,
                                       const std::map<FlowId, Flow>& flows,
                                       const TrafficPlan& plan, const TrafficPlan* prev,
                                       const std::map<FlowId, Flow>* prev_flows) {
  std::map<std::int32_t, NodeSubplan> nodes;
  for (const auto& [id, c] : plan.configs) {
    const Flow& f = flow_of(flows, id);
    emit_flow(net, f, c, plan.version, plan.t_act + plan.start_offset(id), nodes, true);
    if (prev) {
      auto it = prev->configs.find(id);
      if (it != prev->configs.end() && !(it->second == c)) {
        const Flow& old_f = prev_flows ? flow_of(*prev_flows, id) : f;
        emit_flow(net, old_f, it->second, prev->version, 0, nodes, false);
      }
    }
  }
  std::vector<NodeSubplan> out;
  out.reserve(nodes.size());
  for (auto& [idx, sub] : nodes) {
    sub.node = idx;
    auto by_flow_version = [](const auto& a, const auto& b) {
      return std::tie(a.flow, a.version, a.start) < std::tie(b.flow, b.version, b.start);
    };
    std::sort(sub.routes.begin(), sub.routes.end(), [](const auto& a, const auto& b) {
      return std::tie(a.flow, a.version) < std::tie(b.flow, b.version);
    });
    std::sort(sub.windows.begin(), sub.windows.end(), by_flow_version);
    std::sort(sub.sources.begin(), sub.sources.end(), [](const auto& a, const auto& b) {
      return std::tie(a.flow, a.version) < std::tie(b.flow, b.version);
    });
    out.push_back(std::move(sub));
  }
  return out;
}

std::string plan_json(const Network& net, const std::map<FlowId, Flow>& flows,
                      const TrafficPlan& plan, const TrafficPlan* prev,
                      const std::map<FlowId, Flow>* prev_flows, int indent) {
  nlohmann::json j;
  j["activation_time"] = plan.t_act;
  j["flows"] = nlohmann::json::array();
  for (const auto& [id, c] : plan.configs) {
    const Flow& f = flow_of(flows, id);
    nlohmann::json jf;
    jf["id"] = id;
    jf["phi"] = c.phi;
    jf["path"] = nlohmann::json::array();
    for (std::int32_t n : f.paths.at(c.path).nodes) jf["path"].push_back(net.node_id(n));
    jf["start_offset"] = plan.start_offset(id);
    bool reconfigured = false;
    Duration delta_t = 0;
    if (prev) {
      auto it = prev->configs.find(id);
      if (it != prev->configs.end() && !(it->second == c)) {
        reconfigured = true;
        delta_t = reconfig_jitter(net, f, it->second, c);
      }
    }
    jf["reconfigured"] = reconfigured;
    jf["delta_t"] = delta_t;
    j["flows"].push_back(jf);
  }

  auto link_json = [&](std::int32_t link) {
    const auto& [a, b] = net.link_endpoints(link);
    return nlohmann::json::array({net.node_id(a), net.node_id(b)});
  };
  j["subplans"] = nlohmann::json::array();
  for (const NodeSubplan& sub : emit_subplans(net, flows, plan, prev, prev_flows)) {
    nlohmann::json jn;
    jn["node"] = net.node_id(sub.node);
    jn["routes"] = nlohmann::json::array();
    for (const RouteRecord& r : sub.routes)
      jn["routes"].push_back({{"flow", r.flow},
                              {"version", r.version},
                              {"in", link_json(r.in_link)},
                              {"out", link_json(r.out_link)}});
    jn["windows"] = nlohmann::json::array();
    for (const WindowRecord& w : sub.windows)
      jn["windows"].push_back({{"flow", w.flow},
                               {"version", w.version},
                               {"link", link_json(w.link)},
                               {"start", w.start},
                               {"length", w.length},
                               {"t_cycle", w.t_cycle}});
    jn["sources"] = nlohmann::json::array();
    for (const SourceRecord& s : sub.sources)
      jn["sources"].push_back({{"flow", s.flow},
                               {"version", s.version},
                               {"phi", s.phi},
                               {"t_cycle", s.t_cycle},
                               {"first_activation", s.first_activation}});
    j["subplans"].push_back(jn);
  }
  return j.dump(indent);
}

}  // namespace ttplan
