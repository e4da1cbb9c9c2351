#include "ttplan/exact.hpp"

#include <algorithm>
#include <cstdint>

#include "ttplan/error.hpp"

namespace ttplan {

namespace {

struct SearchFlow {
  FlowId id = 0;
  bool active = false;
  std::vector<int> bits;  // positions of this flow's unlocked vertices
};

struct Search {
  const std::vector<SearchFlow>* flows;
  const std::vector<std::uint32_t>* adj;
  std::int64_t actives_total = 0;

  ObjectivePair best{-1, -1};
  std::uint32_t best_mask = 0;

  void dfs(std::size_t i, std::uint32_t chosen, std::uint32_t excluded, ObjectivePair cur) {
    // bound: admitting everything that remains must beat the incumbent
    ObjectivePair bound = cur;
    for (std::size_t k = i; k < flows->size(); ++k)
      ((*flows)[k].active ? bound.active_admits : bound.new_admits) += 1;
    if (bound <= best) return;
    if (i == flows->size()) {
      best = cur;
      best_mask = chosen;
      return;
    }
    const SearchFlow& f = (*flows)[i];
    ObjectivePair with = cur;
    (f.active ? with.active_admits : with.new_admits) += 1;
    for (int b : f.bits) {
      std::uint32_t bit = std::uint32_t{1} << b;
      if (excluded & bit) continue;
      dfs(i + 1, chosen | bit, excluded | (*adj)[b], with);
    }
    dfs(i + 1, chosen, excluded, cur);  // reject this flow
  }
};

}  // namespace

ExactResult exact_best_plan(const ConflictGraph& g, const std::vector<FlowId>& active_flows,
                            const std::vector<FlowId>& new_flows) {
  if (g.vertex_count() > 25)
    throw InstanceTooLarge("exhaustive search capped at 25 vertices, graph has " +
                           std::to_string(g.vertex_count()));

  std::vector<FlowId> actives = active_flows;
  std::vector<FlowId> news = new_flows;
  std::sort(actives.begin(), actives.end());
  std::sort(news.begin(), news.end());

  std::vector<SearchFlow> flows;
  std::vector<VertexId> vert_of_bit;
  std::vector<int> bit_of_vert(g.vertex_capacity(), -1);
  auto collect = [&](FlowId f, bool active) {
    SearchFlow sf;
    sf.id = f;
    sf.active = active;
    for (VertexId v : g.candidates(f)) {
      if (g.vertex(v).lock != LockState::Unlocked) continue;
      bit_of_vert[v] = static_cast<int>(vert_of_bit.size());
      sf.bits.push_back(bit_of_vert[v]);
      vert_of_bit.push_back(v);
    }
    flows.push_back(std::move(sf));
  };
  for (FlowId f : actives) collect(f, true);
  for (FlowId f : news) collect(f, false);

  std::vector<std::uint32_t> adj(vert_of_bit.size(), 0);
  for (std::size_t b = 0; b < vert_of_bit.size(); ++b)
    for (VertexId u : g.vertex(vert_of_bit[b]).nbrs)
      if (bit_of_vert[u] >= 0) adj[b] |= std::uint32_t{1} << bit_of_vert[u];

  Search s;
  s.flows = &flows;
  s.adj = &adj;
  s.dfs(0, 0, 0, ObjectivePair{0, 0});

  ExactResult out;
  out.objective = s.best;
  for (std::size_t b = 0; b < vert_of_bit.size(); ++b) {
    if (s.best_mask & (std::uint32_t{1} << b)) {
      VertexId v = vert_of_bit[b];
      out.selected.push_back(v);
      Configuration c = g.vertex_config(v);
      out.plan.emplace(c.flow, c);
    }
  }
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

}  // namespace ttplan
