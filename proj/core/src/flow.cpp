#include "ttplan/flow.hpp"

#include "ttplan/error.hpp"

namespace ttplan {

Flow register_flow(const Network& net, const FlowParams& params, int n_path) {
  if (params.t_trans < 1)
    throw InvalidParameters("flow " + std::to_string(params.id) + ": t_trans must be >= 1");
  if (params.t_cycle < params.t_trans)
    throw InvalidParameters("flow " + std::to_string(params.id) + ": t_trans exceeds t_cycle");
  if (params.deadline < 1)
    throw InvalidParameters("flow " + std::to_string(params.id) + ": deadline must be >= 1");
  if (params.dt_limit && *params.dt_limit < 0)
    throw InvalidParameters("flow " + std::to_string(params.id) + ": negative dt_limit");

  Flow f;
  f.id = params.id;
  f.src = net.node_index(params.src);
  f.dst = net.node_index(params.dst);
  if (f.src == f.dst)
    throw InvalidParameters("flow " + std::to_string(params.id) + ": src == dst");
  f.t_trans = params.t_trans;
  f.t_cycle = params.t_cycle;
  f.deadline = params.deadline;
  f.dt_limit = params.dt_limit.value_or(params.t_cycle - params.t_trans);
  f.pin_on_admit = params.pin_on_admit;
  try {
    f.paths = k_candidate_paths(net, f.src, f.dst, n_path, f.deadline, f.t_trans);
  } catch (const NoFeasiblePath& e) {
    throw NoFeasiblePath("flow " + std::to_string(params.id) + ": " + e.what());
  }
  return f;
}

std::vector<LinkWindow> link_occupancy(const Network& net, const Flow& f,
                                       const Configuration& c) {
  const Path& p = f.paths.at(c.path);
  const Duration per_hop = net.per_hop_delay(f.t_trans);
  std::vector<LinkWindow> out;
  out.reserve(p.links.size());
  for (std::size_t j = 0; j < p.links.size(); ++j) {
    out.push_back({p.links[j], c.phi + static_cast<Duration>(j) * per_hop, f.t_trans});
  }
  return out;
}

}  // namespace ttplan
