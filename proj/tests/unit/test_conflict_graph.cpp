#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "test_util.hpp"
#include "ttplan/conflict.hpp"
#include "ttplan/conflict_graph.hpp"
#include "ttplan/error.hpp"
#include "ttplan/rng.hpp"

using namespace ttplan;

namespace {

Flow simple_flow(const Network& net, FlowId id, Duration t_trans = 1,
                 Duration t_cycle = 250, int n_path = 1) {
  FlowParams p;
  p.id = id;
  p.src = "ha";
  p.dst = "hb";
  p.t_trans = t_trans;
  p.t_cycle = t_cycle;
  p.deadline = 100000;
  return register_flow(net, p, n_path);
}

// the tail network: flow 1 runs ha-s0-s1-hb, flow 2 joins at s1 via hc and
// shares only the last link
Network tail_network() {
  return Network({{"ha", NodeRole::Host},
                  {"hb", NodeRole::Host},
                  {"hc", NodeRole::Host},
                  {"s0", NodeRole::Infrastructure},
                  {"s1", NodeRole::Infrastructure}},
                 {{"ha", "s0"}, {"s0", "s1"}, {"s1", "hb"}, {"hc", "s1"}});
}

Flow tail_flow(const Network& net, FlowId id, const std::string& src, Duration t_trans) {
  FlowParams p;
  p.id = id;
  p.src = src;
  p.dst = "hb";
  p.t_trans = t_trans;
  p.t_cycle = 250;
  p.deadline = 100000;
  return register_flow(net, p, 1);
}

std::vector<std::pair<Duration, std::int32_t>> take(ConfigGenerator& gen, int n) {
  std::vector<std::pair<Duration, std::int32_t>> out;
  for (int i = 0; i < n && !gen.exhausted(); ++i) out.push_back(gen.next());
  return out;
}

}  // namespace

TEST_CASE("generator walks paths first, then strides, then backfills") {
  ConfigGenerator gen(249, 2);
  gen.set_delta_phi(190);
  auto seq = take(gen, 8);
  std::vector<std::pair<Duration, std::int32_t>> expect = {
      {0, 0}, {0, 1}, {190, 0}, {190, 1}, {1, 0}, {1, 1}, {191, 0}, {191, 1}};
  CHECK(seq == expect);
  CHECK(gen.first_pass_done());
  CHECK(!gen.exhausted());
}

TEST_CASE("generator covers a tiny range exactly once and stops") {
  ConfigGenerator gen(0, 1);
  CHECK(gen.next() == std::pair<Duration, std::int32_t>{0, 0});
  CHECK(gen.exhausted());
  CHECK(gen.first_pass_done());
  CHECK_THROWS_AS(gen.next(), InternalError);
}

TEST_CASE("generator backfill skips covered phases and exhausts") {
  ConfigGenerator gen(4, 1);
  gen.set_delta_phi(2);
  auto seq = take(gen, 10);
  std::vector<std::pair<Duration, std::int32_t>> expect = {
      {0, 0}, {2, 0}, {4, 0}, {1, 0}, {3, 0}};
  CHECK(seq == expect);
  CHECK(gen.exhausted());
}

TEST_CASE("generator emits every pair exactly once under any stride") {
  for (Duration delta : {1, 3, 7, 100}) {
    ConfigGenerator gen(20, 3);
    gen.set_delta_phi(delta);
    std::set<std::pair<Duration, std::int32_t>> seen;
    while (!gen.exhausted()) {
      auto p = gen.next();
      CHECK(seen.insert(p).second);
      CHECK(p.first >= 0);
      CHECK(p.first <= 20);
    }
    CHECK(seen.size() == 21u * 3u);
  }
}

TEST_CASE("insert_config adds edges exactly for conflicting pairs") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1));
  g.add_flow(simple_flow(net, 2));
  g.add_flow(simple_flow(net, 3));

  CHECK(g.insert_config({1, 5, 0}) == 0);
  CHECK(g.insert_config({2, 5, 0}) == 1);  // same schedule, shared path
  CHECK(g.insert_config({2, 6, 0}) == 0);  // back-to-back, conflict-free
  CHECK(g.insert_config({3, 5, 0}) == 2);  // hits both flows' phi=5
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 3);

  CHECK_THROWS_AS(g.insert_config({1, 5, 0}), DuplicateConfiguration);
  CHECK_THROWS_AS(g.insert_config({1, 250, 0}), InvalidParameters);
  CHECK_THROWS_AS(g.insert_config({1, 5, 1}), InvalidParameters);
  CHECK_THROWS_AS(g.insert_config({9, 5, 0}), UnknownFlow);
}

TEST_CASE("graph edges match pairwise conflict recheck on random inserts") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  Rng rng(11);
  std::vector<Duration> cycles = {250, 500};
  for (FlowId id = 1; id <= 6; ++id)
    g.add_flow(simple_flow(net, id, 1 + 2 * (id % 3), cycles[id % 2]));
  for (int i = 0; i < 60; ++i) {
    FlowId id = 1 + rng_below(rng, 6);
    Duration phi = rng_range(rng, 0, phase_range(g.flow(id)).hi);
    try {
      g.insert_config({id, phi, 0});
    } catch (const DuplicateConfiguration&) {
    }
  }

  std::vector<VertexId> all;
  for (FlowId id : g.flow_ids())
    for (VertexId v : g.candidates(id)) all.push_back(v);
  std::size_t edges_seen = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const VertexInfo& a = g.vertex(all[i]);
    std::set<VertexId> nbrs(a.nbrs.begin(), a.nbrs.end());
    CHECK(nbrs.size() == a.nbrs.size());
    edges_seen += nbrs.size();
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const VertexInfo& b = g.vertex(all[j]);
      if (a.flow == b.flow) {
        CHECK(!nbrs.count(all[j]));
        continue;
      }
      bool expect = configs_conflict(net, g.flow(a.flow), g.vertex_config(all[i]),
                                     g.flow(b.flow), g.vertex_config(all[j]));
      CHECK(expect == (nbrs.count(all[j]) != 0));
    }
  }
  CHECK(edges_seen == 2 * g.edge_count());
}

TEST_CASE("purge_flow removes candidates and incident edges") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1));
  g.add_flow(simple_flow(net, 2));
  g.insert_config({1, 5, 0});
  g.insert_config({1, 10, 0});
  g.insert_config({1, 15, 0});
  g.insert_config({2, 5, 0});
  g.insert_config({2, 10, 0});
  CHECK(g.edge_count() == 2);

  CHECK(g.purge_flow(2) == 2);
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 0);
  CHECK(!g.has_flow(2));
  CHECK_THROWS_AS(g.purge_flow(2), UnknownFlow);

  // freed slots are reusable and conflict checks still work
  g.add_flow(simple_flow(net, 2));
  CHECK(g.insert_config({2, 5, 0}) == 1);
  CHECK(g.vertex_count() == 4);
}

TEST_CASE("delta_phi is the 75th percentile transmission duration") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  CHECK_THROWS_AS(g.compute_delta_phi(), EmptyGraph);

  g.add_flow(simple_flow(net, 1, 1));
  g.add_flow(simple_flow(net, 2, 1));
  g.add_flow(simple_flow(net, 3, 3));
  g.add_flow(simple_flow(net, 4, 12));
  CHECK(g.compute_delta_phi() == 3);

  ConflictGraph g5(net);
  for (FlowId id = 1; id <= 3; ++id) g5.add_flow(simple_flow(net, id, 5));
  CHECK(g5.compute_delta_phi() == 5);

  ConflictGraph g1(net);
  g1.add_flow(simple_flow(net, 1, 12));
  CHECK(g1.compute_delta_phi() == 12);
}

TEST_CASE("growth caps new flows and throttles settled active flows") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1));  // range [0, 249]
  auto r = g.grow_candidates({1}, {}, 50, false);
  CHECK(r.added[1] == 50);
  CHECK(g.candidates(1).size() == 50);

  // an active flow mid-first-pass keeps growing without pressure
  auto r2 = g.grow_candidates({}, {1}, 50, false);
  CHECK(r2.added[1] == 50);

  // a flow whose walk has wrapped only grows under pressure
  ConflictGraph h(net);
  Flow tiny = simple_flow(net, 2, 246);  // range [0, 4]
  h.add_flow(tiny);
  h.generator(2).set_delta_phi(2);
  auto h1 = h.grow_candidates({2}, {}, 3, false);
  CHECK(h1.added[2] == 3);  // phi 0, 2, 4: first pass complete
  CHECK(h.generator(2).first_pass_done());
  auto h2 = h.grow_candidates({}, {2}, 3, false);
  CHECK(h2.total == 0);
  auto h3 = h.grow_candidates({}, {2}, 3, true);
  CHECK(h3.added[2] == 2);  // backfill phi 1, 3
  CHECK(h.generator(2).exhausted());
  auto h4 = h.grow_candidates({}, {2}, 3, true);
  CHECK(h4.total == 0);
}

TEST_CASE("pinned flows are excluded from growth") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1));
  g.grow_candidates({1}, {}, 3, false);
  Configuration keep = g.vertex_config(g.candidates(1)[0]);
  CHECK(g.pin_flow(1, keep) == 2);
  CHECK(g.pinned(1));
  CHECK(g.candidates(1).size() == 1);
  auto r = g.grow_candidates({}, {1}, 50, true);
  CHECK(r.total == 0);
  CHECK(g.pin_flow(1, keep) == 0);
  CHECK_THROWS_AS(g.insert_config({1, 200, 0}), InvalidParameters);
  CHECK_THROWS_AS(g.pin_flow(1, {1, 201, 0}), InvalidParameters);
}

TEST_CASE("reconfiguration locks shield a flow's own drain") {
  // diamond: short branch (l=3) and long branch (l=5) share the first and
  // last links, so a late long-path packet is still draining s3->hb when an
  // early short-path packet of the next version arrives
  Network net({{"ha", NodeRole::Host},
               {"hb", NodeRole::Host},
               {"s0", NodeRole::Infrastructure},
               {"s3", NodeRole::Infrastructure},
               {"sa", NodeRole::Infrastructure},
               {"sb1", NodeRole::Infrastructure},
               {"sb2", NodeRole::Infrastructure},
               {"sb3", NodeRole::Infrastructure}},
              {{"ha", "s0"},
               {"s0", "sa"},
               {"sa", "s3"},
               {"s3", "hb"},
               {"s0", "sb1"},
               {"sb1", "sb2"},
               {"sb2", "sb3"},
               {"sb3", "s3"}});
  Flow f = simple_flow(net, 1, 12, 250, 2);
  REQUIRE(f.paths.size() == 2);
  REQUIRE(f.paths[0].infra_hops == 3);
  REQUIRE(f.paths[1].infra_hops == 5);
  CHECK(f.dt_limit == 238);

  ConflictGraph g(net);
  g.add_flow(f);
  Configuration cur{1, 238, 1};  // drains s3->hb over [t_act+63, t_act+75)
  g.insert_config(cur);
  g.insert_config({1, 10, 0});   // short-path window [55, 67) overlaps: transition
  g.insert_config({1, 6, 0});    // touches at 63, but delta_t -262: qos
  g.insert_config({1, 30, 0});   // touches at 75, delta_t exactly -238: free
  g.insert_config({1, 50, 0});   // clear of the drain, delta_t -218: free
  g.insert_config({1, 0, 1});    // same path, windows trail the drain: free

  std::map<FlowId, Configuration> plan = {{1, cur}};
  int locked = g.apply_reconfiguration_locks(plan);
  CHECK(locked == 2);
  CHECK(g.vertex(*g.find_vertex({1, 10, 0})).lock == LockState::Transition);
  CHECK(g.vertex(*g.find_vertex({1, 6, 0})).lock == LockState::Qos);
  CHECK(g.vertex(*g.find_vertex({1, 30, 0})).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex({1, 50, 0})).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex({1, 0, 1})).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex(cur)).lock == LockState::Unlocked);
}

TEST_CASE("reconfiguration locks shield other flows' drains via graph edges") {
  Network net = tail_network();
  Flow a = tail_flow(net, 1, "ha", 12);  // drains s1->hb over [t_act+18, t_act+30)
  Flow b = tail_flow(net, 2, "hc", 1);

  ConflictGraph g(net);
  g.add_flow(a);
  g.add_flow(b);
  Configuration cur_a{1, 238, 0};
  Configuration cur_b{2, 100, 0};
  g.insert_config(cur_a);
  g.insert_config(cur_b);
  g.insert_config({2, 20, 0});  // conflicts with cur_a and lands in its drain
  g.insert_config({2, 40, 0});  // conflict-free with cur_a, clear of the drain

  REQUIRE(g.vertex(*g.find_vertex({2, 20, 0})).nbrs.size() == 1);
  REQUIRE(g.vertex(*g.find_vertex({2, 40, 0})).nbrs.empty());

  std::map<FlowId, Configuration> plan = {{1, cur_a}, {2, cur_b}};
  int locked = g.apply_reconfiguration_locks(plan);
  CHECK(locked == 1);
  CHECK(g.vertex(*g.find_vertex({2, 20, 0})).lock == LockState::Transition);
  CHECK(g.vertex(*g.find_vertex({2, 40, 0})).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex(cur_a)).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex(cur_b)).lock == LockState::Unlocked);
}

TEST_CASE("a removed flow's drain still locks overlapping candidates") {
  Network net = tail_network();
  Flow a = tail_flow(net, 1, "ha", 12);
  Flow b = tail_flow(net, 2, "hc", 1);

  ConflictGraph g(net);
  g.add_flow(b);
  Configuration cur_b{2, 100, 0};
  g.insert_config(cur_b);
  g.insert_config({2, 20, 0});
  g.insert_config({2, 40, 0});

  std::map<FlowId, Configuration> plan = {{2, cur_b}};
  std::vector<std::pair<Flow, Configuration>> removed = {{a, Configuration{1, 238, 0}}};
  int locked = g.apply_reconfiguration_locks(plan, removed);
  CHECK(locked == 1);
  CHECK(g.vertex(*g.find_vertex({2, 20, 0})).lock == LockState::Transition);
  CHECK(g.vertex(*g.find_vertex({2, 40, 0})).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex(cur_b)).lock == LockState::Unlocked);
}

TEST_CASE("after locking, no unlocked candidate breaks its flow's jitter budget") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  FlowParams p;
  p.id = 1;
  p.src = "ha";
  p.dst = "hb";
  p.t_trans = 1;
  p.t_cycle = 250;
  p.deadline = 100000;
  p.dt_limit = 60;
  Flow f = register_flow(net, p, 1);
  g.add_flow(f);
  Configuration cur{1, 100, 0};
  g.insert_config(cur);
  for (Duration phi : {0, 30, 50, 120, 170, 200, 249}) g.insert_config({1, phi, 0});

  std::map<FlowId, Configuration> plan = {{1, cur}};
  g.apply_reconfiguration_locks(plan);
  for (VertexId v : g.candidates(1)) {
    const VertexInfo& rec = g.vertex(v);
    if (rec.lock != LockState::Unlocked) continue;
    Duration dt = reconfig_jitter(net, f, cur, g.vertex_config(v));
    CHECK(std::abs(dt) <= 60);
  }
  CHECK(g.vertex(*g.find_vertex({1, 0, 0})).lock == LockState::Qos);
  CHECK(g.vertex(*g.find_vertex({1, 120, 0})).lock == LockState::Unlocked);
}

TEST_CASE("conservative locks hold every non-current active candidate") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1));
  g.add_flow(simple_flow(net, 2));
  for (Duration phi : {0, 10, 20}) g.insert_config({1, phi, 0});
  for (Duration phi : {0, 10}) g.insert_config({2, phi, 0});

  std::map<FlowId, Configuration> plan = {{1, {1, 10, 0}}};
  CHECK(g.lock_conservative(plan) == 2);  // flow 2 is not in the plan
  CHECK(g.vertex(*g.find_vertex({1, 10, 0})).lock == LockState::Unlocked);
  CHECK(g.vertex(*g.find_vertex({1, 0, 0})).lock == LockState::Conservative);
  CHECK(g.vertex(*g.find_vertex({1, 20, 0})).lock == LockState::Conservative);
  CHECK(g.vertex(*g.find_vertex({2, 0, 0})).lock == LockState::Unlocked);

  CHECK(g.clear_conservative_locks() == 2);
  CHECK(g.vertex(*g.find_vertex({1, 0, 0})).lock == LockState::Unlocked);
}

TEST_CASE("clear_temporary_locks releases all lock kinds at once") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1));
  g.add_flow(simple_flow(net, 2));
  VertexId v1 = g.add_vertex_unchecked({1, 0, 0}, LockState::Transition);
  VertexId v2 = g.add_vertex_unchecked({1, 1, 0}, LockState::Qos);
  VertexId v3 = g.add_vertex_unchecked({2, 0, 0}, LockState::Conservative);
  VertexId v4 = g.add_vertex_unchecked({2, 1, 0}, LockState::Unlocked);
  CHECK(g.clear_temporary_locks() == 3);
  for (VertexId v : {v1, v2, v3, v4}) CHECK(g.vertex(v).lock == LockState::Unlocked);
  CHECK(g.clear_temporary_locks() == 0);
}

TEST_CASE("snapshot round-trip preserves vertices, locks, and edges") {
  Network net = test::line_network(2);
  ConflictGraph g(net);
  g.add_flow(simple_flow(net, 1, 1, 250));
  g.add_flow(simple_flow(net, 2, 3, 500));
  g.add_flow(simple_flow(net, 3, 1, 250));
  Rng rng(5);
  for (FlowId id : {1, 2, 3})
    for (int i = 0; i < 8; ++i) {
      try {
        g.insert_config({id, rng_range(rng, 0, phase_range(g.flow(id)).hi), 0});
      } catch (const DuplicateConfiguration&) {
      }
    }
  g.purge_flow(3);  // exercise freed slots in the export
  std::map<FlowId, Configuration> plan = {{1, g.vertex_config(g.candidates(1)[0])}};
  g.apply_reconfiguration_locks(plan);
  g.lock_conservative(plan);

  std::string text = g.snapshot_json();
  ConflictGraph back = ConflictGraph::from_snapshot_json(net, text);
  CHECK(back.vertex_count() == g.vertex_count());
  CHECK(back.edge_count() == g.edge_count());
  CHECK(back.flow_ids() == g.flow_ids());
  for (FlowId id : g.flow_ids())
    for (VertexId v : g.candidates(id)) {
      auto w = back.find_vertex(g.vertex_config(v));
      REQUIRE(w.has_value());
      CHECK(back.vertex(*w).lock == g.vertex(v).lock);
      CHECK(back.vertex(*w).nbrs.size() == g.vertex(v).nbrs.size());
    }
  CHECK(back.snapshot_json() == text);
}
