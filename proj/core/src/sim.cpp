#include "ttplan/sim.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <tuple>

#include "ttplan/error.hpp"

namespace ttplan {

namespace {

struct Stream {
  const Flow* flow = nullptr;
  const Path* path = nullptr;
  std::int64_t version = 0;
  Instant first_send = 0;  // send instant of k = 0
  std::int64_t k_begin = 0;
  std::int64_t k_end = 0;  // exclusive
};

struct Delivered {
  FlowId flow = 0;
  std::int64_t version = 0;
  std::int64_t k = 0;
  Instant send = 0;
  Instant delivery = 0;
};

// Runs every stream's packets through the network and reports busy-port
// encounters plus all deliveries, in deterministic order.
void run_streams(const Network& net, const std::vector<Stream>& streams,
                 std::vector<QueuingViolation>& violations,
                 std::vector<Delivered>& delivered) {
  // event: packet of streams[s], cycle k, ready to transmit path link at pos
  using Ev = std::tuple<Instant, FlowId, std::int64_t, std::int64_t, std::size_t, std::size_t>;
  std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> events;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    const Stream& st = streams[s];
    for (std::int64_t k = st.k_begin; k < st.k_end; ++k)
      events.push({st.first_send + k * st.flow->t_cycle, st.flow->id, st.version, k, 0, s});
  }

  std::vector<Instant> busy_until(net.link_count(), 0);
  std::vector<FlowId> occupant(net.link_count(), 0);
  while (!events.empty()) {
    auto [t, fid, version, k, pos, s] = events.top();
    events.pop();
    const Stream& st = streams[s];
    std::int32_t link = st.path->links[pos];
    Instant start = t;
    if (busy_until[link] > t) {
      violations.push_back({t, link, fid, occupant[link]});
      start = busy_until[link];
    }
    busy_until[link] = start + st.flow->t_trans;
    occupant[link] = fid;
    Instant arrival = start + st.flow->t_trans + net.t_prop();
    if (pos + 1 < st.path->links.size()) {
      events.push({arrival + net.t_proc(), fid, version, k, pos + 1, s});
    } else {
      delivered.push_back(
          {fid, version, k, st.first_send + k * st.flow->t_cycle, arrival + net.t_dst()});
    }
  }
  std::sort(delivered.begin(), delivered.end(), [](const Delivered& a, const Delivered& b) {
    return std::tie(a.flow, a.version, a.k) < std::tie(b.flow, b.version, b.k);
  });
}

const Flow& flow_of(const std::map<FlowId, Flow>& flows, FlowId id) {
  auto it = flows.find(id);
  if (it == flows.end())
    throw MalformedInput("plan references unknown flow " + std::to_string(id));
  return it->second;
}

Duration plan_hyper_cycle(const std::map<FlowId, Flow>& flows, const TrafficPlan& plan) {
  Duration cycle = 1;
  for (const auto& [id, c] : plan.configs) cycle = std::lcm(cycle, flow_of(flows, id).t_cycle);
  return cycle;
}

Stream make_stream(const std::map<FlowId, Flow>& flows, const TrafficPlan& plan, FlowId id,
                   std::int64_t version) {
  const Flow& f = flow_of(flows, id);
  const Configuration& c = plan.configs.at(id);
  if (c.path < 0 || c.path >= static_cast<std::int32_t>(f.paths.size()))
    throw MalformedInput("plan references unknown path of flow " + std::to_string(id));
  Stream st;
  st.flow = &f;
  st.path = &f.paths[c.path];
  st.version = version;
  st.first_send = plan.t_act + plan.start_offset(id) + c.phi;
  return st;
}

}  // namespace

std::vector<QueuingViolation> simulate_plan(const Network& net,
                                            const std::map<FlowId, Flow>& flows,
                                            const TrafficPlan& plan, Duration horizon) {
  if (plan.configs.empty()) return {};
  if (horizon < plan_hyper_cycle(flows, plan))
    throw InvalidParameters("simulation horizon shorter than the plan's hyper-cycle");
  std::vector<Stream> streams;
  for (const auto& [id, c] : plan.configs) {
    Stream st = make_stream(flows, plan, id, plan.version);
    Instant cutoff = plan.t_act + horizon;
    if (st.first_send < cutoff)
      st.k_end = ceil_div(cutoff - st.first_send, st.flow->t_cycle);
    streams.push_back(st);
  }
  std::vector<QueuingViolation> violations;
  std::vector<Delivered> delivered;
  run_streams(net, streams, violations, delivered);
  return violations;
}

Duration default_sim_horizon(const Network& net, const std::map<FlowId, Flow>& flows,
                             const TrafficPlan& plan) {
  Duration tail = 0;
  for (const auto& [id, c] : plan.configs) {
    const Flow& f = flow_of(flows, id);
    tail = std::max(tail, c.phi + net.path_e2e_delay(f.paths.at(c.path), f.t_trans));
  }
  return 2 * plan_hyper_cycle(flows, plan) + tail;
}

TransitionReport simulate_transition(const Network& net,
                                     const std::map<FlowId, Flow>& flows,
                                     const TrafficPlan& old_plan,
                                     const TrafficPlan& new_plan) {
  Instant t_act = new_plan.t_act;
  if (!old_plan.configs.empty()) {
    Duration lcm_old = plan_hyper_cycle(flows, old_plan);
    if (t_act < old_plan.t_act || (t_act - old_plan.t_act) % lcm_old != 0)
      throw MisalignedActivation("activation instant " + std::to_string(t_act) +
                                 " is not a hyper-cycle boundary of the predecessor");
  }

  std::vector<Stream> streams;
  Duration lcm_new = plan_hyper_cycle(flows, new_plan);
  // old sources run long enough before the boundary that everything still in
  // flight at t_act has full history, then stop; their last send is below
  // t_act, the boundary send already belongs to the new version
  for (const auto& [id, c] : old_plan.configs) {
    Stream st = make_stream(flows, old_plan, id, old_plan.version);
    Duration tail = c.phi + net.path_e2e_delay(*st.path, st.flow->t_trans);
    Instant from = t_act - (ceil_div(tail, st.flow->t_cycle) + 2) * st.flow->t_cycle;
    if (st.first_send < from) st.k_begin = ceil_div(from - st.first_send, st.flow->t_cycle);
    if (st.first_send < t_act)
      st.k_end = ceil_div(t_act - st.first_send, st.flow->t_cycle);
    st.k_end = std::max(st.k_end, st.k_begin);
    streams.push_back(st);
  }
  Duration max_offset = 0;
  for (const auto& [id, off] : new_plan.start_offsets) max_offset = std::max(max_offset, off);
  Instant cutoff = t_act + max_offset + 2 * lcm_new;
  for (const auto& [id, c] : new_plan.configs) {
    Stream st = make_stream(flows, new_plan, id, new_plan.version);
    if (st.first_send < cutoff) st.k_end = ceil_div(cutoff - st.first_send, st.flow->t_cycle);
    streams.push_back(st);
  }

  TransitionReport report;
  std::vector<Delivered> delivered;
  run_streams(net, streams, report.violations, delivered);

  for (const auto& [id, c] : old_plan.configs) {
    FlowTransition& ft = report.flows[id];
    ft.flow = id;
    ft.in_old = true;
  }
  for (const auto& [id, c] : new_plan.configs) {
    FlowTransition& ft = report.flows[id];
    ft.flow = id;
    ft.in_new = true;
    if (ft.in_old) {
      auto o = old_plan.configs.at(id);
      ft.reconfigured = !(o == c);
    }
  }

  // per-flow delivery sequence in send order (old version sends all precede
  // new version sends by construction)
  std::map<FlowId, std::vector<Delivered>> by_flow;
  for (const Delivered& d : delivered) by_flow[d.flow].push_back(d);
  for (auto& [id, seq] : by_flow) {
    FlowTransition& ft = report.flows.at(id);
    const Flow& f = flow_of(flows, id);
    if (ft.in_old && ft.in_new) {
      Instant last_old = 0;
      Instant first_new = 0;
      bool have_old = false, have_new = false;
      for (const Delivered& d : seq) {
        if (d.version == old_plan.version) {
          last_old = d.delivery;
          have_old = true;
        } else if (!have_new) {
          first_new = d.delivery;
          have_new = true;
        }
      }
      if (have_old && have_new) ft.deviation = first_new - (last_old + f.t_cycle);
    }
    std::vector<char> irregular(seq.size(), 0);
    for (std::size_t i = 1; i < seq.size(); ++i)
      if (seq[i].delivery - seq[i - 1].delivery != f.t_cycle) irregular[i] = 1;
    for (std::size_t i = 0; i < seq.size(); ++i)
      for (std::size_t j = i + 1; j < seq.size(); ++j)
        if (seq[j].delivery < seq[i].delivery) irregular[i] = irregular[j] = 1;
    ft.reorder_count = std::count(irregular.begin(), irregular.end(), 1);
  }
  return report;
}

}  // namespace ttplan
