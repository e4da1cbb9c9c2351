#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "test_util.hpp"
#include "ttplan/error.hpp"
#include "ttplan/network.hpp"

using namespace ttplan;

namespace {

// ring of n switches, each cabled to the next; one host per switch
Network ring_network(int n) {
  std::vector<std::pair<std::string, NodeRole>> nodes;
  std::vector<std::pair<std::string, std::string>> cables;
  for (int i = 0; i < n; ++i) {
    std::string s = "s" + std::to_string(i);
    std::string h = "h" + std::to_string(i);
    nodes.push_back({s, NodeRole::Infrastructure});
    nodes.push_back({h, NodeRole::Host});
    cables.push_back({h, s});
    cables.push_back({s, "s" + std::to_string((i + 1) % n)});
  }
  return Network(std::move(nodes), cables);
}

bool loop_free(const Path& p) {
  std::set<std::int32_t> seen(p.nodes.begin(), p.nodes.end());
  return seen.size() == p.nodes.size();
}

}  // namespace

TEST_CASE("node indices follow lexicographic id order") {
  Network net({{"zz", NodeRole::Host}, {"aa", NodeRole::Host}, {"mm", NodeRole::Infrastructure}},
              {{"zz", "mm"}, {"aa", "mm"}});
  CHECK(net.node_id(0) == "aa");
  CHECK(net.node_id(1) == "mm");
  CHECK(net.node_id(2) == "zz");
  CHECK(net.node_index("mm") == 1);
  CHECK(net.role(1) == NodeRole::Infrastructure);
  CHECK(net.neighbors(1) == std::vector<std::int32_t>{0, 2});
}

TEST_CASE("cables expand to directed links in both directions") {
  Network net = test::line_network(1);  // ha - s0 - hb
  CHECK(net.node_count() == 3);
  CHECK(net.link_count() == 4);
  std::int32_t ha = net.node_index("ha");
  std::int32_t s0 = net.node_index("s0");
  CHECK(net.link_between(ha, s0).has_value());
  CHECK(net.link_between(s0, ha).has_value());
  CHECK(net.link_between(ha, s0) != net.link_between(s0, ha));
  CHECK(!net.link_between(ha, net.node_index("hb")).has_value());
}

TEST_CASE("network constructor rejects malformed input") {
  CHECK_THROWS_AS(Network({{"a", NodeRole::Host}, {"a", NodeRole::Host}}, {{"a", "a"}}),
                  InvalidParameters);
  CHECK_THROWS_AS(Network({{"a", NodeRole::Host}, {"b", NodeRole::Host}}, {{"a", "c"}}),
                  InvalidParameters);
  CHECK_THROWS_AS(Network({{"a", NodeRole::Host}, {"b", NodeRole::Host}}, {{"a", "a"}}),
                  InvalidParameters);
}

TEST_CASE("per-hop delay is transmission plus propagation plus processing") {
  Network net = test::line_network(1, 2, 1);
  CHECK(net.per_hop_delay(1) == 4);
  CHECK(net.per_hop_delay(12) == 15);
  Network bare = test::line_network(1, 0, 0);
  CHECK(bare.per_hop_delay(1) == 1);
}

TEST_CASE("end-to-end delay follows the hop count") {
  Network net = test::line_network(2, 2, 1);  // ha - s0 - s1 - hb, l = 2
  std::int32_t ha = net.node_index("ha");
  std::int32_t hb = net.node_index("hb");
  auto paths = k_candidate_paths(net, ha, hb, 3, 100000, 1);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].infra_hops == 2);
  CHECK(net.path_e2e_delay(paths[0], 1) == 10);

  // direct host-to-host cable, l = 0
  Network direct({{"ha", NodeRole::Host}, {"hb", NodeRole::Host}}, {{"ha", "hb"}}, 2, 1);
  auto d = k_candidate_paths(direct, direct.node_index("ha"), direct.node_index("hb"), 1,
                             100000, 1);
  REQUIRE(d.size() == 1);
  CHECK(d[0].infra_hops == 0);
  CHECK(direct.path_e2e_delay(d[0], 1) == 2);

  // l = 4 with host processing on both ends
  Network chain = test::line_network(4, 2, 1);
  Network chain_hosts(
      {{"ha", NodeRole::Host},
       {"hb", NodeRole::Host},
       {"s0", NodeRole::Infrastructure},
       {"s1", NodeRole::Infrastructure},
       {"s2", NodeRole::Infrastructure},
       {"s3", NodeRole::Infrastructure}},
      {{"ha", "s0"}, {"s0", "s1"}, {"s1", "s2"}, {"s2", "s3"}, {"s3", "hb"}}, 2, 1, 2, 2);
  auto c = k_candidate_paths(chain_hosts, chain_hosts.node_index("ha"),
                             chain_hosts.node_index("hb"), 1, 100000, 3);
  REQUIRE(c.size() == 1);
  CHECK(c[0].infra_hops == 4);
  CHECK(chain_hosts.path_e2e_delay(c[0], 3) == 32);
}

TEST_CASE("candidate paths on a ring split clockwise and counter-clockwise") {
  Network net = ring_network(8);
  std::int32_t h0 = net.node_index("h0");
  std::int32_t h1 = net.node_index("h1");

  auto paths = k_candidate_paths(net, h0, h1, 3, 1000000, 1);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].infra_hops == 2);  // h0-s0-s1-h1
  CHECK(paths[1].infra_hops == 8);  // the long way round
  CHECK(paths[0].index == 0);
  CHECK(paths[1].index == 1);
  CHECK(static_cast<int>(paths[0].links.size()) == paths[0].infra_hops + 1);
  CHECK(static_cast<int>(paths[1].links.size()) == paths[1].infra_hops + 1);
  for (const auto& p : paths) CHECK(loop_free(p));

  // deadline that only the short path meets: e2e = 1 + 1 + l*4
  auto tight = k_candidate_paths(net, h0, h1, 3, 10, 1);
  REQUIRE(tight.size() == 1);
  CHECK(tight[0].infra_hops == 2);

  CHECK_THROWS_AS(k_candidate_paths(net, h0, h1, 3, 5, 1), NoFeasiblePath);
  CHECK_THROWS_AS(k_candidate_paths(net, h0, h0, 3, 1000, 1), InvalidParameters);
}

TEST_CASE("candidate paths are deterministic and hop-ordered") {
  Network net = ring_network(6);
  std::int32_t a = net.node_index("h0");
  std::int32_t b = net.node_index("h3");
  auto first = k_candidate_paths(net, a, b, 4, 1000000, 1);
  auto second = k_candidate_paths(net, a, b, 4, 1000000, 1);
  REQUIRE(first.size() == second.size());
  REQUIRE(first.size() == 2);  // two ways around, equal length
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].nodes == second[i].nodes);
    CHECK(first[i].links == second[i].links);
  }
  for (std::size_t i = 1; i < first.size(); ++i)
    CHECK(first[i - 1].infra_hops <= first[i].infra_hops);
  // equal hop count: lexicographic node-id sequence decides; s0's neighbors
  // sort s1 < s5 so the path through s1 comes first
  CHECK(first[0].nodes[2] == net.node_index("s1"));
  CHECK(first[1].nodes[2] == net.node_index("s5"));
}

TEST_CASE("network json round-trip preserves structure and delays") {
  Network net = ring_network(4);
  std::string text = net.to_json_string();
  Network back = Network::from_json_string(text);
  CHECK(back.node_count() == net.node_count());
  CHECK(back.link_count() == net.link_count());
  CHECK(back.t_proc() == net.t_proc());
  CHECK(back.t_prop() == net.t_prop());
  for (std::int32_t i = 0; i < net.node_count(); ++i) {
    CHECK(back.node_id(i) == net.node_id(i));
    CHECK(back.role(i) == net.role(i));
    CHECK(back.neighbors(i) == net.neighbors(i));
  }
  CHECK(back.to_json_string() == text);
}
