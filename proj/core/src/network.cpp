#include "ttplan/network.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ttplan {

namespace {

std::int64_t pair_key(std::int32_t a, std::int32_t b) {
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Network::Network(std::vector<std::pair<std::string, NodeRole>> nodes,
                 const std::vector<std::pair<std::string, std::string>>& cables,
                 Duration t_proc, Duration t_prop, Duration t_src, Duration t_dst)
    : t_proc_(t_proc), t_prop_(t_prop), t_src_(t_src), t_dst_(t_dst) {
  if (t_proc < 0 || t_prop < 0 || t_src < 0 || t_dst < 0)
    throw InvalidParameters("network delays must be non-negative");
  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (nodes[i].first == nodes[i + 1].first)
      throw InvalidParameters("duplicate node id: " + nodes[i].first);
  ids_.reserve(nodes.size());
  roles_.reserve(nodes.size());
  for (auto& n : nodes) {
    ids_.push_back(std::move(n.first));
    roles_.push_back(n.second);
  }
  adj_.assign(ids_.size(), {});

  std::set<std::pair<std::int32_t, std::int32_t>> directed;
  for (const auto& [a_id, b_id] : cables) {
    std::int32_t a = node_index(a_id);
    std::int32_t b = node_index(b_id);
    if (a == b) throw InvalidParameters("self-link at node " + a_id);
    if (directed.count({a, b}))
      throw InvalidParameters("duplicate cable " + a_id + " - " + b_id);
    directed.insert({a, b});
    directed.insert({b, a});
  }
  links_.assign(directed.begin(), directed.end());
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(links_.size()); ++i) {
    link_lookup_[pair_key(links_[i].first, links_[i].second)] = i;
    adj_[links_[i].first].push_back(links_[i].second);
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
}

std::int32_t Network::node_index(const std::string& id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) throw InvalidParameters("unknown node id: " + id);
  return static_cast<std::int32_t>(it - ids_.begin());
}

std::optional<std::int32_t> Network::link_between(std::int32_t a, std::int32_t b) const {
  auto it = link_lookup_.find(pair_key(a, b));
  if (it == link_lookup_.end()) return std::nullopt;
  return it->second;
}

std::string Network::to_json_string(int indent) const {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (std::int32_t i = 0; i < node_count(); ++i) {
    j["nodes"].push_back({{"id", ids_[i]},
                          {"role", roles_[i] == NodeRole::Host ? "host" : "infrastructure"}});
  }
  j["links"] = nlohmann::json::array();
  for (const auto& [a, b] : links_) {
    if (a < b) j["links"].push_back({ids_[a], ids_[b]});  // one entry per cable
  }
  j["t_proc"] = t_proc_;
  j["t_prop"] = t_prop_;
  j["t_src"] = t_src_;
  j["t_dst"] = t_dst_;
  return j.dump(indent);
}

Network Network::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("topology JSON: ") + e.what());
  }
  try {
    std::vector<std::pair<std::string, NodeRole>> nodes;
    for (const auto& n : j.at("nodes")) {
      std::string role = n.at("role").get<std::string>();
      if (role != "host" && role != "infrastructure")
        throw MalformedInput("node role must be host or infrastructure");
      nodes.emplace_back(n.at("id").get<std::string>(),
                         role == "host" ? NodeRole::Host : NodeRole::Infrastructure);
    }
    std::vector<std::pair<std::string, std::string>> cables;
    for (const auto& l : j.at("links"))
      cables.emplace_back(l.at(0).get<std::string>(), l.at(1).get<std::string>());
    return Network(std::move(nodes), cables, j.value("t_proc", Duration{2}),
                   j.value("t_prop", Duration{1}), j.value("t_src", Duration{0}),
                   j.value("t_dst", Duration{0}));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("topology JSON: ") + e.what());
  } catch (const MalformedInput&) {
    throw;
  } catch (const Error& e) {
    throw MalformedInput(std::string("topology JSON: ") + e.what());
  }
}

Network Network::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

void Network::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw MalformedInput("cannot write " + path);
  out << to_json_string() << "\n";
}

namespace {

// Lexicographically smallest minimum-hop path from src to dst avoiding the
// banned nodes/links, or nullopt. dist is computed backwards from dst so the
// forward walk can greedily take the smallest feasible neighbor.
std::optional<std::vector<std::int32_t>> lex_min_shortest(
    const Network& net, std::int32_t src, std::int32_t dst,
    const std::vector<char>& banned_node, const std::set<std::pair<std::int32_t, std::int32_t>>& banned_link) {
  const std::int32_t n = net.node_count();
  std::vector<std::int32_t> dist(n, -1);
  std::vector<std::int32_t> queue;
  queue.push_back(dst);
  dist[dst] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::int32_t u = queue[head];
    for (std::int32_t v : net.neighbors(u)) {
      // traversing v -> u forward; ban applies to the forward direction
      if (banned_node[v]) continue;
      if (banned_link.count({v, u})) continue;
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  if (dist[src] == -1) return std::nullopt;
  std::vector<std::int32_t> path{src};
  std::int32_t cur = src;
  while (cur != dst) {
    std::int32_t next = -1;
    for (std::int32_t v : net.neighbors(cur)) {
      if (banned_node[v]) continue;
      if (banned_link.count({cur, v})) continue;
      if (dist[v] == dist[cur] - 1) {
        next = v;
        break;  // neighbors sorted: first hit is lexicographically smallest
      }
    }
    if (next == -1) return std::nullopt;  // defensive; cannot happen
    path.push_back(next);
    cur = next;
  }
  return path;
}

struct SeqLess {
  bool operator()(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

}  // namespace

std::vector<Path> k_candidate_paths(const Network& net, std::int32_t src, std::int32_t dst,
                                    int n_path, Duration deadline, Duration t_trans) {
  if (src == dst) throw InvalidParameters("k_candidate_paths: src == dst");
  if (net.role(src) != NodeRole::Host || net.role(dst) != NodeRole::Host)
    throw InvalidParameters("k_candidate_paths: endpoints must be hosts");
  if (n_path < 1) throw InvalidParameters("k_candidate_paths: n_path must be >= 1");
  if (t_trans < 1) throw InvalidParameters("k_candidate_paths: t_trans must be >= 1");

  std::int32_t host_count = 0;
  for (std::int32_t i = 0; i < net.node_count(); ++i)
    if (net.role(i) == NodeRole::Host) ++host_count;
  // A node sequence of L links visits at least L - 1 - (host_count - 2)
  // infrastructure nodes, which lower-bounds the e2e delay of any path of
  // that length and lets Yen's loop stop early.
  auto min_e2e_for_links = [&](std::size_t nlinks) {
    std::int64_t min_infra =
        std::max<std::int64_t>(0, static_cast<std::int64_t>(nlinks) - 1 - (host_count - 2));
    return t_trans + net.t_prop() + min_infra * net.per_hop_delay(t_trans) + net.t_src() +
           net.t_dst();
  };

  auto build_path = [&](const std::vector<std::int32_t>& nodes) {
    Path p;
    p.nodes = nodes;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      auto l = net.link_between(nodes[i], nodes[i + 1]);
      if (!l) throw InternalError("path uses a missing link");
      p.links.push_back(*l);
    }
    for (std::int32_t n : nodes)
      if (net.role(n) == NodeRole::Infrastructure) ++p.infra_hops;
    return p;
  };

  // Yen's algorithm over the strict total order (link count, node sequence).
  std::vector<std::vector<std::int32_t>> shortest;  // accepted node sequences, in order
  std::set<std::vector<std::int32_t>, SeqLess> candidates;
  std::vector<Path> result;

  std::vector<char> no_ban(net.node_count(), 0);
  auto first = lex_min_shortest(net, src, dst, no_ban, {});
  if (!first)
    throw NoFeasiblePath("no path from " + net.node_id(src) + " to " + net.node_id(dst));
  shortest.push_back(*first);

  while (!shortest.empty()) {
    const auto& seq = shortest.back();
    Duration e2e = net.path_e2e_delay(build_path(seq), t_trans);
    if (e2e <= deadline) {
      Path p = build_path(seq);
      p.index = static_cast<std::int32_t>(result.size());
      result.push_back(std::move(p));
      if (static_cast<int>(result.size()) == n_path) break;
    }
    if (min_e2e_for_links(seq.size() - 1) > deadline) break;

    // spur expansions of the path just popped
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      std::vector<std::int32_t> root(seq.begin(), seq.begin() + i + 1);
      std::set<std::pair<std::int32_t, std::int32_t>> banned_link;
      for (const auto& prev : shortest) {
        if (prev.size() > i + 1 &&
            std::equal(root.begin(), root.end(), prev.begin()))
          banned_link.insert({prev[i], prev[i + 1]});
      }
      std::vector<char> banned_node(net.node_count(), 0);
      for (std::size_t r = 0; r < i; ++r) banned_node[root[r]] = 1;
      auto spur = lex_min_shortest(net, seq[i], dst, banned_node, banned_link);
      if (!spur) continue;
      std::vector<std::int32_t> whole(root.begin(), root.end() - 1);
      whole.insert(whole.end(), spur->begin(), spur->end());
      bool known = std::find(shortest.begin(), shortest.end(), whole) != shortest.end();
      if (!known) candidates.insert(std::move(whole));
    }
    if (candidates.empty()) break;
    shortest.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  if (result.empty())
    throw NoFeasiblePath("no path from " + net.node_id(src) + " to " + net.node_id(dst) +
                         " within deadline " + std::to_string(deadline));
  return result;
}

}  // namespace ttplan
