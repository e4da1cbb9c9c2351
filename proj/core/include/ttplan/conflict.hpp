#pragma once

#include "ttplan/flow.hpp"
#include "ttplan/network.hpp"
#include "ttplan/time.hpp"

namespace ttplan {

// True iff the two configurations of *different* flows would ever force
// buffering on a shared directed link, i.e. some periodic transmission
// windows of a and b intersect (half-open; touching endpoints are fine).
// Periodicity is resolved exactly over the joint hyper-cycle.
bool configs_conflict(const Network& net, const Flow& fa, const Configuration& ca,
                      const Flow& fb, const Configuration& cb);

// True iff packets of the old configuration that are still in flight at the
// activation boundary collide with packets of the new configuration sent
// from the boundary on. Old sends happen at t_act - m*t_cycle + phi (m >= 1),
// new sends at t_act + k*t_cycle' + phi' (k >= 0). The old and new
// configuration may belong to the same flow (reconfiguration) or to
// different flows.
bool transition_interference(const Network& net, const Flow& old_f,
                             const Configuration& old_c, const Flow& new_f,
                             const Configuration& new_c);

// Reception-time shift of the first new-version packet relative to the old
// rhythm: (phi' - phi) + (l' - l) * per_hop_delay. Signed.
Duration reconfig_jitter(const Network& net, const Flow& f, const Configuration& from,
                         const Configuration& to);

// Upper bound on packets delivered out of order or with irregular spacing
// around a reconfiguration: 2 * ceil(|dt| / t_cycle).
std::int64_t reorder_bound(Duration dt, Duration t_cycle);

// How far past an activation boundary the flow's final pre-boundary packet
// is still being delivered: max(0, phi + t_e2e - t_cycle).
Duration transition_interval_length(const Network& net, const Flow& f,
                                    const Configuration& c);

}  // namespace ttplan
