#include <doctest.h>

#include <optional>
#include <vector>

#include "test_util.hpp"
#include "ttplan/conflict.hpp"
#include "ttplan/error.hpp"
#include "ttplan/planner.hpp"

using namespace ttplan;

namespace {

FlowParams params(FlowId id, Duration t_trans, Duration t_cycle, Duration deadline = 100000) {
  FlowParams p;
  p.id = id;
  p.src = "ha";
  p.dst = "hb";
  p.t_trans = t_trans;
  p.t_cycle = t_cycle;
  p.deadline = deadline;
  return p;
}

}  // namespace

TEST_CASE("first request activates immediately and fills the empty plan") {
  Network net = test::line_network(2);
  PlannerConfig cfg;
  cfg.n_ub = 1;
  Planner planner(net, cfg);

  PlanUpdate u = planner.process_request({params(1, 125, 250)});
  CHECK(u.phase == PlanPhase::Defensive);
  CHECK(u.admitted_new == std::vector<FlowId>{1});
  CHECK(u.rejected.empty());
  CHECK(u.reconfigured.empty());
  CHECK(u.plan.version == 1);
  CHECK(u.plan.t_act == 0);
  CHECK(u.plan.t0 == 0);
  CHECK(u.plan.configs.at(1) == Configuration{1, 0, 0});
  CHECK(u.plan.start_offset(1) == 0);  // no predecessor, no drain to dodge
  CHECK(u.graph_vertices == 1);
}

TEST_CASE("offensive phase moves an active flow to rescue a new one") {
  // the single path fits two t_trans=125 flows only at phases {0, 125}; the
  // incumbent sits at 0, so the newcomer's only candidate (phase 0) is dead
  // until the incumbent is allowed to slide to 125
  Network net = test::line_network(2);
  PlannerConfig cfg;
  cfg.n_ub = 1;
  Planner planner(net, cfg);
  planner.process_request({params(1, 125, 250, 1000)});

  PlanUpdate u = planner.process_request({params(2, 125, 250)});
  CHECK(u.phase == PlanPhase::Offensive);
  CHECK(u.admitted_new == std::vector<FlowId>{2});
  CHECK(u.rejected.empty());
  REQUIRE(u.reconfigured.size() == 1);
  CHECK(u.reconfigured[0].id == 1);
  CHECK(u.reconfigured[0].delta_t == 125);
  CHECK(u.plan.configs.at(1) == Configuration{1, 125, 0});
  CHECK(u.plan.configs.at(2) == Configuration{2, 0, 0});
  // predecessor drain tail is 132, so the newcomer skips one full cycle
  CHECK(u.plan.start_offset(2) == 250);
  CHECK(u.plan.t_act == 250);
  CHECK(u.plan.version == 2);
  CHECK(u.gfh_runs == 2);
  CHECK(!planner.prev_step_had_rejects());
}

TEST_CASE("conservative result is kept when freeing the actives does not help") {
  // the newcomer needs 240 of the 250 slots and collides with the incumbent
  // wherever either of them sits
  Network net = test::line_network(2);
  PlannerConfig cfg;
  cfg.n_ub = 1;
  Planner planner(net, cfg);
  planner.process_request({params(1, 125, 250, 1000)});

  PlanUpdate u = planner.process_request({params(2, 240, 250)});
  CHECK(u.phase == PlanPhase::Reverted);
  CHECK(u.admitted_new.empty());
  REQUIRE(u.rejected.size() == 1);
  CHECK(u.rejected[0].id == 2);
  CHECK(!u.rejected[0].reason.empty());
  CHECK(u.reconfigured.empty());
  CHECK(u.plan.configs.at(1) == Configuration{1, 0, 0});
  CHECK(!u.plan.configs.count(2));
  CHECK(u.graph_vertices == 2);  // the rejected flow's candidates are purged
  CHECK(planner.prev_step_had_rejects());

  // rejection pressure makes the active flow grow candidates next step
  PlanUpdate u2 = planner.process_request({});
  CHECK(u2.phase == PlanPhase::Defensive);
  CHECK(u2.graph_vertices == 3);
  CHECK(!planner.prev_step_had_rejects());
}

TEST_CASE("request validation") {
  Network net = test::line_network(2);
  Planner planner(net);
  planner.process_request({params(1, 1, 250)});

  SUBCASE("adding the same id twice in one request") {
    CHECK_THROWS_AS(planner.process_request({params(2, 1, 250), params(2, 1, 500)}),
                    DuplicateFlow);
  }
  SUBCASE("re-adding an active flow without removing it") {
    CHECK_THROWS_AS(planner.process_request({params(1, 1, 250)}), DuplicateFlow);
  }
  SUBCASE("removing a flow that is not in the plan") {
    CHECK_THROWS_AS(planner.process_request({}, {7}), UnknownFlow);
  }
  SUBCASE("duplicate ids in the removal list") {
    CHECK_THROWS_AS(planner.process_request({}, {1, 1}), InvalidParameters);
  }
  SUBCASE("infeasible flow parameters are a rejection, not an error") {
    PlanUpdate u = planner.process_request({params(2, 1, 250, 5), params(3, 1, 250)});
    REQUIRE(u.rejected.size() == 1);
    CHECK(u.rejected[0].id == 2);  // deadline below the best path delay
    CHECK(!u.rejected[0].reason.empty());
    CHECK(u.admitted_new == std::vector<FlowId>{3});
  }
}

TEST_CASE("removal frees the slot and the drain delays the replacement") {
  Network net = test::line_network(2);
  PlannerConfig cfg;
  cfg.n_ub = 1;
  Planner planner(net, cfg);
  planner.process_request({params(1, 125, 250, 1000)});

  PlanUpdate u = planner.process_request({params(2, 125, 250, 1000)}, {1});
  REQUIRE(u.removed.size() == 1);
  CHECK(u.removed[0].first.id == 1);
  CHECK(u.removed[0].second == Configuration{1, 0, 0});
  CHECK(u.admitted_new == std::vector<FlowId>{2});
  CHECK(u.plan.configs.at(2) == Configuration{2, 0, 0});
  CHECK(!u.plan.configs.count(1));
  // the departed flow still drains 132 past the boundary
  CHECK(u.plan.start_offset(2) == 250);
}

TEST_CASE("an id can be removed and re-added in the same request") {
  Network net = test::line_network(2);
  Planner planner(net);
  planner.process_request({params(1, 1, 250)});
  PlanUpdate u = planner.process_request({params(1, 2, 500)}, {1});
  CHECK(u.admitted_new == std::vector<FlowId>{1});
  CHECK(u.plan.configs.at(1).flow == 1);
  CHECK(u.flows.at(1).t_cycle == 500);
}

TEST_CASE("explicit readiness snaps to the activation grid") {
  Network net = test::line_network(2);
  Planner planner(net);
  planner.process_request({params(1, 1, 250)});
  PlanUpdate u = planner.process_request({params(2, 1, 250)}, {}, 777);
  CHECK(u.plan.t_act == 1000);
  CHECK(u.plan.t0 == 0);
}

TEST_CASE("actives are never evicted under load") {
  Network net = test::line_network(2);
  PlannerConfig cfg;
  cfg.n_ub = 8;
  Planner planner(net, cfg);
  std::vector<FlowId> admitted;
  for (FlowId id = 1; id <= 12; ++id) {
    PlanUpdate u = planner.process_request({params(id, 25, 250, 2000)});
    for (FlowId a : admitted) CHECK(u.plan.configs.count(a));
    if (u.plan.configs.count(id)) admitted.push_back(id);
  }
  CHECK(admitted.size() >= 2);
  CHECK(admitted.size() < 12);  // the link saturates well before twelve

  // whatever was admitted must be pairwise conflict-free
  const TrafficPlan& plan = planner.plan();
  for (FlowId a : admitted)
    for (FlowId b : admitted) {
      if (a >= b) continue;
      CHECK(!configs_conflict(net, planner.graph().flow(a), plan.configs.at(a),
                              planner.graph().flow(b), plan.configs.at(b)));
    }
}
