#include <benchmark/benchmark.h>

#include <map>
#include <string>
#include <vector>

#include "ttplan/conflict.hpp"
#include "ttplan/conflict_graph.hpp"
#include "ttplan/gfh.hpp"
#include "ttplan/network.hpp"
#include "ttplan/planner.hpp"
#include "ttplan/rng.hpp"
#include "ttplan/scenario.hpp"
#include "ttplan/sim.hpp"

using namespace ttplan;

namespace {

Network ring16() {
  TopologySpec ts;
  ts.model = TopologyModel::Ring;
  ts.n = 16;
  ts.k = 2;
  return gen_topology(ts, 11);
}

FlowParams random_params(const Network& net, Rng& rng, FlowId id) {
  const Duration cycles[] = {250, 500, 1000};
  const Duration trans[] = {3, 5, 12};
  std::vector<std::string> hosts;
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(net.node_count()); ++i)
    if (net.role(i) == NodeRole::Host) hosts.push_back(net.node_id(i));
  FlowParams p;
  p.id = id;
  p.src = hosts[rng_below(rng, hosts.size())];
  do {
    p.dst = hosts[rng_below(rng, hosts.size())];
  } while (p.dst == p.src);
  p.t_cycle = cycles[rng_below(rng, 3)];
  p.t_trans = trans[rng_below(rng, 3)];
  p.deadline = 1'000'000;
  return p;
}

// graph with n flows, candidates grown once
ConflictGraph grown_graph(const Network& net, int n, std::vector<FlowId>& ids) {
  Rng rng(17);
  ConflictGraph g(net);
  for (FlowId id = 1; id <= n; ++id) {
    g.add_flow(register_flow(net, random_params(net, rng, id), 3));
    ids.push_back(id);
  }
  g.grow_candidates(ids, {}, 30, false);
  return g;
}

void BM_PairConflictCheck(benchmark::State& state) {
  Network net = ring16();
  Rng rng(3);
  Flow fa = register_flow(net, random_params(net, rng, 1), 3);
  Flow fb = register_flow(net, random_params(net, rng, 2), 3);
  Configuration ca{1, 40, 0};
  Configuration cb{2, 45, 1};
  for (auto _ : state)
    benchmark::DoNotOptimize(configs_conflict(net, fa, ca, fb, cb));
}
BENCHMARK(BM_PairConflictCheck);

void BM_CandidateGrowth(benchmark::State& state) {
  Network net = ring16();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    Rng rng(17);
    ConflictGraph g(net);
    std::vector<FlowId> ids;
    for (FlowId id = 1; id <= n; ++id) {
      g.add_flow(register_flow(net, random_params(net, rng, id), 3));
      ids.push_back(id);
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(g.grow_candidates(ids, {}, 30, false));
    state.counters["vertices"] = static_cast<double>(g.vertex_count());
    state.counters["edges"] = static_cast<double>(g.edge_count());
  }
}
BENCHMARK(BM_CandidateGrowth)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GreedySelection(benchmark::State& state) {
  Network net = ring16();
  std::vector<FlowId> ids;
  ConflictGraph g = grown_graph(net, static_cast<int>(state.range(0)), ids);
  std::vector<FlowId> actives(ids.begin(), ids.begin() + ids.size() / 2);
  std::vector<FlowId> news(ids.begin() + ids.size() / 2, ids.end());
  for (auto _ : state) benchmark::DoNotOptimize(run_gfh(g, actives, news));
}
BENCHMARK(BM_GreedySelection)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

// steady-state request processing: every step admits a few flows and removes
// as many established ones
void BM_PlannerStep(benchmark::State& state) {
  Network net = ring16();
  PlannerConfig cfg;
  cfg.n_ub = 20;
  Planner planner(net, cfg);
  Rng rng(23);
  FlowId next = 1;
  const int target = static_cast<int>(state.range(0));
  while (static_cast<int>(planner.plan().configs.size()) < target && next < 4 * target) {
    std::vector<FlowParams> batch;
    for (int i = 0; i < 10; ++i) batch.push_back(random_params(net, rng, next++));
    planner.process_request(batch);
  }
  for (auto _ : state) {
    state.PauseTiming();
    std::vector<FlowParams> batch;
    for (int i = 0; i < 5; ++i) batch.push_back(random_params(net, rng, next++));
    std::vector<FlowId> remove;
    for (const auto& [id, cfg2] : planner.plan().configs) {
      remove.push_back(id);
      if (remove.size() == 5) break;
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(planner.process_request(batch, remove));
  }
  state.counters["active"] = static_cast<double>(planner.plan().configs.size());
}
BENCHMARK(BM_PlannerStep)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_PlanSimulation(benchmark::State& state) {
  Network net = ring16();
  PlannerConfig cfg;
  cfg.n_ub = 20;
  Planner planner(net, cfg);
  Rng rng(29);
  FlowId next = 1;
  PlanUpdate u;
  while (static_cast<int>(planner.plan().configs.size()) < 60 && next < 240) {
    std::vector<FlowParams> batch;
    for (int i = 0; i < 10; ++i) batch.push_back(random_params(net, rng, next++));
    u = planner.process_request(batch);
  }
  Duration horizon = default_sim_horizon(net, u.flows, u.plan);
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_plan(net, u.flows, u.plan, horizon));
}
BENCHMARK(BM_PlanSimulation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
