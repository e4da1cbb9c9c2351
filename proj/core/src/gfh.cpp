#include "ttplan/gfh.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "ttplan/error.hpp"

namespace ttplan {

GfhRun::GfhRun(const ConflictGraph& g, double alpha) : g_(&g), alpha_(alpha) {
  in_c_.assign(g.vertex_capacity(), 0);
  shadowed_.assign(g.vertex_capacity(), 0);
  for (FlowId f : g.flow_ids()) {
    std::int64_t n = 0;
    for (VertexId v : g.candidates(f))
      if (g.vertex(v).lock == LockState::Unlocked) ++n;
    eligible_[f] = n;
    admitted_[f] = 0;
  }
}

bool GfhRun::eligible(VertexId v) const {
  return g_->vertex(v).lock == LockState::Unlocked && !shadowed_[v] && !in_c_[v];
}

std::int64_t GfhRun::eligible_count(FlowId f) const {
  auto it = eligible_.find(f);
  if (it == eligible_.end()) throw UnknownFlow("flow " + std::to_string(f) + " not in graph");
  return it->second;
}

bool GfhRun::admitted(FlowId f) const {
  auto it = admitted_.find(f);
  if (it == admitted_.end()) throw UnknownFlow("flow " + std::to_string(f) + " not in graph");
  return it->second != 0;
}

std::vector<VertexId> GfhRun::selected() const {
  std::vector<VertexId> out = c_;
  std::sort(out.begin(), out.end());
  return out;
}

void GfhRun::commit(VertexId v) {
  const VertexInfo& rec = g_->vertex(v);
  for (VertexId u : rec.nbrs)
    if (in_c_[u]) throw InternalError("selection would break C-independence");
  in_c_[v] = 1;
  c_.push_back(v);
  admitted_[rec.flow] = 1;
  --eligible_[rec.flow];
  for (VertexId u : rec.nbrs) {
    const VertexInfo& urec = g_->vertex(u);
    if (urec.lock != LockState::Unlocked || shadowed_[u]) continue;
    shadowed_[u] = 1;
    --eligible_[urec.flow];
  }
}

void GfhRun::solitary_init() {
  for (FlowId f : g_->flow_ids()) {
    for (VertexId v : g_->candidates(f)) {
      const VertexInfo& rec = g_->vertex(v);
      if (rec.lock != LockState::Unlocked) continue;
      bool solitary = true;
      for (VertexId u : rec.nbrs) {
        if (g_->vertex(u).lock == LockState::Unlocked) {
          solitary = false;
          break;
        }
      }
      if (solitary) commit(v);
    }
  }
}

double GfhRun::shadow_rating(VertexId v) const {
  // group v's eligible neighbors by owning flow; accumulate in flow-id order
  std::map<FlowId, std::int64_t> hit;
  for (VertexId u : g_->vertex(v).nbrs)
    if (eligible(u)) ++hit[g_->vertex(u).flow];
  double rating = 0.0;
  for (const auto& [f, count] : hit) {
    std::int64_t total = eligible_.at(f);
    if (count == total)
      rating += alpha_;
    else
      rating += static_cast<double>(count) / static_cast<double>(total);
  }
  return rating;
}

std::int64_t GfhRun::degree_sum(FlowId f) const {
  std::int64_t sum = 0;
  for (VertexId v : g_->candidates(f)) {
    if (!eligible(v)) continue;
    for (VertexId u : g_->vertex(v).nbrs)
      if (g_->vertex(u).lock == LockState::Unlocked) ++sum;
  }
  return sum;
}

void GfhRun::add_config_per_flow(const std::vector<FlowId>& search) {
  // min-heap keyed (eligible asc, degree desc, id asc); stale keys are
  // detected at pop time and re-inserted with fresh values
  using Key = std::tuple<std::int64_t, std::int64_t, FlowId>;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap;
  auto key_of = [&](FlowId f) { return Key{eligible_count(f), -degree_sum(f), f}; };
  for (FlowId f : search)
    if (!admitted(f)) heap.push(key_of(f));

  while (!heap.empty()) {
    Key top = heap.top();
    heap.pop();
    FlowId f = std::get<2>(top);
    if (admitted(f)) continue;
    Key fresh = key_of(f);
    if (fresh != top) {
      heap.push(fresh);
      continue;
    }
    if (eligible_count(f) == 0) continue;  // nothing selectable, stays unadmitted

    VertexId best = -1;
    double best_rating = 0.0;
    for (VertexId v : g_->candidates(f)) {
      if (!eligible(v)) continue;
      double r = shadow_rating(v);
      if (best < 0 || r < best_rating ||
          (r == best_rating &&
           std::pair{g_->vertex(v).phi, g_->vertex(v).path} <
               std::pair{g_->vertex(best).phi, g_->vertex(best).path})) {
        best = v;
        best_rating = r;
      }
    }
    commit(best);
  }
}

ObjectivePair objective_value(const std::map<FlowId, Configuration>& plan,
                              const std::vector<FlowId>& active_flows,
                              const std::vector<FlowId>& new_flows) {
  ObjectivePair obj;
  for (FlowId f : active_flows)
    if (plan.count(f)) ++obj.active_admits;
  for (FlowId f : new_flows)
    if (plan.count(f)) ++obj.new_admits;
  return obj;
}

namespace {

std::map<FlowId, Configuration> plan_from_c(const ConflictGraph& g,
                                            const std::vector<VertexId>& c) {
  std::map<FlowId, Configuration> plan;
  for (VertexId v : c) {
    Configuration cfg = g.vertex_config(v);
    auto it = plan.find(cfg.flow);
    if (it == plan.end())
      plan.emplace(cfg.flow, cfg);
    else if (config_less(cfg, it->second))
      it->second = cfg;
  }
  return plan;
}

ObjectivePair count_admits(const GfhRun& run, const std::vector<FlowId>& actives,
                           const std::vector<FlowId>& news) {
  ObjectivePair obj;
  for (FlowId f : actives)
    if (run.admitted(f)) ++obj.active_admits;
  for (FlowId f : news)
    if (run.admitted(f)) ++obj.new_admits;
  return obj;
}

}  // namespace

GfhResult run_gfh(const ConflictGraph& g, const std::vector<FlowId>& active_flows,
                  const std::vector<FlowId>& new_flows, const GfhParams& params) {
  std::vector<FlowId> actives = active_flows;
  std::vector<FlowId> news = new_flows;
  std::sort(actives.begin(), actives.end());
  std::sort(news.begin(), news.end());
  for (FlowId f : actives)
    if (std::binary_search(news.begin(), news.end(), f))
      throw InvalidParameters("flow " + std::to_string(f) + " is both active and new");

  ObjectivePair full{static_cast<std::int64_t>(actives.size()),
                     static_cast<std::int64_t>(news.size())};
  // the processing order fully determines a run, so a repeated order is a
  // repeated result and the re-run loop can stop early
  using Order = std::vector<std::vector<FlowId>>;
  auto execute = [&](const Order& order) {
    GfhRun run(g, params.alpha);
    run.solitary_init();
    for (const auto& subset : order) run.add_config_per_flow(subset);
    return run;
  };
  auto strip_empty = [](Order order) {
    std::erase_if(order, [](const std::vector<FlowId>& s) { return s.empty(); });
    return order;
  };
  auto split_by_outcome = [&](const GfhRun& run) {
    Order next(4);
    for (FlowId f : actives) next[run.admitted(f) ? 1 : 0].push_back(f);
    for (FlowId f : news) next[run.admitted(f) ? 3 : 2].push_back(f);
    return next;
  };

  Order order = {actives, news};
  GfhRun run = execute(order);
  GfhResult result;
  result.first_run_objective = count_admits(run, actives, news);
  result.objective = result.first_run_objective;
  result.selected = run.selected();
  result.runs = 1;

  Order prev_sig = strip_empty(order);
  GfhRun last = std::move(run);
  for (int i = 0; i < params.n_reruns && result.objective < full; ++i) {
    Order next = split_by_outcome(last);
    Order sig = strip_empty(next);
    if (sig == prev_sig) break;
    last = execute(next);
    prev_sig = std::move(sig);
    ++result.runs;
    ObjectivePair obj = count_admits(last, actives, news);
    if (obj > result.objective) {
      result.objective = obj;
      result.selected = last.selected();
    }
  }

  result.all_admitted = result.objective == full;
  result.plan = plan_from_c(g, result.selected);
  return result;
}

}  // namespace ttplan
