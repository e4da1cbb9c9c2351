#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttplan/network.hpp"
#include "ttplan/time.hpp"

namespace ttplan {

struct FlowParams {
  FlowId id = 0;
  std::string src;
  std::string dst;
  Duration t_trans = 0;
  Duration t_cycle = 0;
  Duration deadline = 0;
  std::optional<Duration> dt_limit;  // default: t_cycle - t_trans (in-order bound)
  bool pin_on_admit = false;
};

struct Flow {
  FlowId id = 0;
  std::int32_t src = -1;
  std::int32_t dst = -1;
  Duration t_trans = 0;
  Duration t_cycle = 0;
  Duration deadline = 0;
  Duration dt_limit = 0;
  bool pin_on_admit = false;
  std::vector<Path> paths;  // candidate paths, index == Path::index
};

// One vertex of the conflict graph: flow + phase offset + path choice.
struct Configuration {
  FlowId flow = 0;
  Duration phi = 0;
  std::int32_t path = 0;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// (phi, path) order within one flow.
inline bool config_less(const Configuration& a, const Configuration& b) {
  if (a.phi != b.phi) return a.phi < b.phi;
  return a.path < b.path;
}

struct LinkWindow {
  std::int32_t link = -1;
  Instant start = 0;
  Duration length = 0;
};

struct PhaseRange {
  Duration lo = 0;
  Duration hi = 0;  // inclusive
};

// Validates parameters, computes candidate paths, applies the dt_limit
// default. Throws InvalidParameters / NoFeasiblePath.
Flow register_flow(const Network& net, const FlowParams& params, int n_path);

inline PhaseRange phase_range(const Flow& f) { return {0, f.t_cycle - f.t_trans}; }

// Half-open windows [start, start + t_trans) per path link within one cycle
// starting at the flow's send instant phi; link j starts at
// phi + j * per_hop_delay.
std::vector<LinkWindow> link_occupancy(const Network& net, const Flow& f,
                                       const Configuration& c);

}  // namespace ttplan
