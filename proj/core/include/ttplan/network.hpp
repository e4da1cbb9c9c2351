#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ttplan/error.hpp"
#include "ttplan/time.hpp"

namespace ttplan {

enum class NodeRole : std::uint8_t { Host, Infrastructure };

// A loop-free directed route between two hosts. Link j carries the packet's
// j-th transmission; infra_hops is the number of infrastructure nodes the
// path traverses (the "l" of the end-to-end delay model).
struct Path {
  std::vector<std::int32_t> nodes;
  std::vector<std::int32_t> links;
  std::int32_t infra_hops = 0;
  std::int32_t index = 0;
};

class Network {
 public:
  // Cables are undirected and expanded into two directed links each.
  Network(std::vector<std::pair<std::string, NodeRole>> nodes,
          const std::vector<std::pair<std::string, std::string>>& cables,
          Duration t_proc = 2, Duration t_prop = 1, Duration t_src = 0,
          Duration t_dst = 0);

  std::int32_t node_count() const { return static_cast<std::int32_t>(ids_.size()); }
  std::int32_t node_index(const std::string& id) const;
  const std::string& node_id(std::int32_t idx) const { return ids_.at(idx); }
  NodeRole role(std::int32_t idx) const { return roles_.at(idx); }
  // Neighbor indices in increasing order; node indices follow the
  // lexicographic order of node ids, so this is also lexicographic.
  const std::vector<std::int32_t>& neighbors(std::int32_t idx) const { return adj_.at(idx); }

  std::int32_t link_count() const { return static_cast<std::int32_t>(links_.size()); }
  std::optional<std::int32_t> link_between(std::int32_t a, std::int32_t b) const;
  const std::pair<std::int32_t, std::int32_t>& link_endpoints(std::int32_t link) const {
    return links_.at(link);
  }

  Duration t_proc() const { return t_proc_; }
  Duration t_prop() const { return t_prop_; }
  Duration t_src() const { return t_src_; }
  Duration t_dst() const { return t_dst_; }

  Duration per_hop_delay(Duration t_trans) const { return t_trans + t_prop_ + t_proc_; }
  Duration path_e2e_delay(const Path& p, Duration t_trans) const {
    return t_trans + t_prop_ + static_cast<Duration>(p.infra_hops) * per_hop_delay(t_trans) +
           t_src_ + t_dst_;
  }

  std::string to_json_string(int indent = 2) const;
  static Network from_json_string(const std::string& text);
  static Network load_file(const std::string& path);
  void save_file(const std::string& path) const;

 private:
  std::vector<std::string> ids_;  // sorted lexicographically
  std::vector<NodeRole> roles_;
  std::vector<std::vector<std::int32_t>> adj_;
  std::vector<std::pair<std::int32_t, std::int32_t>> links_;  // sorted by (from, to)
  std::unordered_map<std::int64_t, std::int32_t> link_lookup_;
  Duration t_proc_, t_prop_, t_src_, t_dst_;
};

// Up to n_path loop-free paths between two hosts, ordered by increasing hop
// count with lexicographic node-id sequence as tie-break, filtered to
// path_e2e_delay <= deadline. Path::index is the position in the result.
std::vector<Path> k_candidate_paths(const Network& net, std::int32_t src, std::int32_t dst,
                                    int n_path, Duration deadline, Duration t_trans);

}  // namespace ttplan
