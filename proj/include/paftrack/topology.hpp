// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "paftrack/types.hpp"

namespace paftrack {

struct Limb {
    JointKind a;
    JointKind b;
};

// Spanning tree over the 14 joints: 13 limbs, connected, acyclic.
struct SkeletonTopology {
    std::vector<Limb> limbs;
    int limb_count() const { return static_cast<int>(limbs.size()); }
};

// Fixed neck-rooted limb tree; every limb's `a` endpoint appears in an
// earlier limb, so skeleton merging grows outward from the head.
const SkeletonTopology& default_topology();

// Empty iff the topology is a connected acyclic cover of all joints that
// contains the head_top-neck limb and no duplicate pairs.
std::vector<std::string> topology_violations(const SkeletonTopology& topo);

}  // namespace paftrack
