#include "ttplan/conflict.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "ttplan/error.hpp"

namespace ttplan {

namespace {

// Positions of each shared directed link in both paths. Pairs (j_a, j_b)
// such that pa.links[j_a] == pb.links[j_b].
std::vector<std::pair<std::int32_t, std::int32_t>> shared_links(const Path& pa, const Path& pb) {
  std::vector<std::pair<std::int32_t, std::int32_t>> out;
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(pa.links.size()); ++i)
    for (std::int32_t j = 0; j < static_cast<std::int32_t>(pb.links.size()); ++j)
      if (pa.links[i] == pb.links[j]) out.push_back({i, j});
  return out;
}

}  // namespace

bool configs_conflict(const Network& net, const Flow& fa, const Configuration& ca,
                      const Flow& fb, const Configuration& cb) {
  if (fa.id == fb.id) throw InvalidParameters("configs_conflict: same flow on both sides");
  const Path& pa = fa.paths.at(ca.path);
  const Path& pb = fb.paths.at(cb.path);
  const Duration per_a = net.per_hop_delay(fa.t_trans);
  const Duration per_b = net.per_hop_delay(fb.t_trans);
  const Duration g = std::gcd(fa.t_cycle, fb.t_cycle);

  for (const auto& [ja, jb] : shared_links(pa, pb)) {
    // window of a repeats at sa + i*t_cycle_a, of b at sb + i*t_cycle_b; the
    // achievable start differences are (sb - sa) + g*Z, so the windows meet
    // somewhere in the hyper-cycle iff that residue falls inside
    // (-len_b, len_a) modulo g.
    const Instant sa = ca.phi + static_cast<Duration>(ja) * per_a;
    const Instant sb = cb.phi + static_cast<Duration>(jb) * per_b;
    const Duration d = pos_mod(sb - sa, g);
    if (d < fa.t_trans || g - d < fb.t_trans) return true;
  }
  return false;
}

bool transition_interference(const Network& net, const Flow& old_f,
                             const Configuration& old_c, const Flow& new_f,
                             const Configuration& new_c) {
  const Path& po = old_f.paths.at(old_c.path);
  const Path& pn = new_f.paths.at(new_c.path);
  const Duration per_o = net.per_hop_delay(old_f.t_trans);
  const Duration per_n = net.per_hop_delay(new_f.t_trans);

  for (const auto& [jo, jn] : shared_links(po, pn)) {
    // old windows on this link, relative to t_act = 0:
    //   [phi_o - m*T_o + jo*per_o, +t_trans_o) for m >= 1,
    // considered only while they extend past the boundary.
    const Instant base_o = old_c.phi + static_cast<Duration>(jo) * per_o;
    const Instant off_n = new_c.phi + static_cast<Duration>(jn) * per_n;
    for (Duration m = 1;; ++m) {
      const Instant w_start = base_o - m * old_f.t_cycle;
      const Instant w_end = w_start + old_f.t_trans;
      if (w_end <= 0) break;  // fully delivered before the boundary
      // smallest k >= 0 whose new window ends after w_start
      const Duration k0 =
          std::max<Duration>(0, ceil_div(w_start - off_n - new_f.t_trans + 1, new_f.t_cycle));
      const Instant u = off_n + k0 * new_f.t_cycle;
      if (u < w_end && u + new_f.t_trans > w_start) return true;
    }
  }
  return false;
}

Duration reconfig_jitter(const Network& net, const Flow& f, const Configuration& from,
                         const Configuration& to) {
  const Duration per_hop = net.per_hop_delay(f.t_trans);
  const Duration dl = f.paths.at(to.path).infra_hops - f.paths.at(from.path).infra_hops;
  return (to.phi - from.phi) + dl * per_hop;
}

std::int64_t reorder_bound(Duration dt, Duration t_cycle) {
  return 2 * ceil_div(std::llabs(dt), t_cycle);
}

Duration transition_interval_length(const Network& net, const Flow& f,
                                    const Configuration& c) {
  const Duration e2e = net.path_e2e_delay(f.paths.at(c.path), f.t_trans);
  return std::max<Duration>(0, c.phi + e2e - f.t_cycle);
}

}  // namespace ttplan
