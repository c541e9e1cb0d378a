// SPDX-License-Identifier: Apache-2.0
#include "paftrack/topology.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace paftrack {

namespace {

const std::array<std::string_view, kJointCount> kJointNames = {
    "head_top", "neck",   "r_shoulder", "r_elbow", "r_wrist", "l_shoulder", "l_elbow",
    "l_wrist",  "r_hip",  "r_knee",     "r_ankle", "l_hip",   "l_knee",     "l_ankle",
};

}  // namespace

std::string_view joint_name(JointKind kind) { return kJointNames[joint_index(kind)]; }

std::optional<JointKind> joint_from_name(std::string_view name) {
    for (int i = 0; i < kJointCount; ++i)
        if (kJointNames[i] == name) return static_cast<JointKind>(i);
    return std::nullopt;
}

Grid Grid::for_image(int image_width, int image_height, int scale_factor) {
    return Grid{(image_width + scale_factor - 1) / scale_factor,
                (image_height + scale_factor - 1) / scale_factor, scale_factor};
}

const SkeletonTopology& default_topology() {
    using K = JointKind;
    static const SkeletonTopology topo{{
        {K::head_top, K::neck},
        {K::neck, K::r_shoulder},
        {K::neck, K::l_shoulder},
        {K::r_shoulder, K::r_elbow},
        {K::r_elbow, K::r_wrist},
        {K::l_shoulder, K::l_elbow},
        {K::l_elbow, K::l_wrist},
        {K::neck, K::r_hip},
        {K::neck, K::l_hip},
        {K::r_hip, K::r_knee},
        {K::r_knee, K::r_ankle},
        {K::l_hip, K::l_knee},
        {K::l_knee, K::l_ankle},
    }};
    return topo;
}

std::vector<std::string> topology_violations(const SkeletonTopology& topo) {
    std::vector<std::string> out;
    if (topo.limb_count() != kJointCount - 1)
        out.push_back("expected " + std::to_string(kJointCount - 1) + " limbs, got " +
                      std::to_string(topo.limb_count()));

    bool has_head = false;
    std::vector<std::pair<int, int>> seen;
    for (const Limb& limb : topo.limbs) {
        const int a = joint_index(limb.a);
        const int b = joint_index(limb.b);
        if (a == b) out.push_back("degenerate limb " + std::string(joint_name(limb.a)));
        const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            out.push_back("duplicate limb " + std::string(joint_name(limb.a)) + "-" +
                          std::string(joint_name(limb.b)));
        seen.push_back(key);
        if (key.first == joint_index(JointKind::head_top) &&
            key.second == joint_index(JointKind::neck))
            has_head = true;
    }
    if (!has_head) out.push_back("missing head_top-neck limb");

    // Union-find connectivity + cycle check.
    std::array<int, kJointCount> parent{};
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    bool cycle = false;
    for (const Limb& limb : topo.limbs) {
        const int ra = find(joint_index(limb.a));
        const int rb = find(joint_index(limb.b));
        if (ra == rb) {
            cycle = true;
            continue;
        }
        parent[ra] = rb;
    }
    if (cycle) out.push_back("limb graph has a cycle");
    int components = 0;
    for (int v = 0; v < kJointCount; ++v)
        if (find(v) == v) ++components;
    if (components != 1) out.push_back("limb graph is not connected");
    return out;
}

}  // namespace paftrack
