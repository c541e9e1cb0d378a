// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "paftrack/types.hpp"

namespace paftrack {

struct Candidate {
    JointKind kind = JointKind::head_top;
    Vec2f position;  // sub-pixel grid coordinates
    float score = 0.0f;
    bool from_occluded_map = false;
};

struct CandidateSet {
    std::array<std::vector<Candidate>, kJointCount> by_kind;

    const std::vector<Candidate>& of(JointKind k) const { return by_kind[joint_index(k)]; }
    int count(JointKind k) const { return static_cast<int>(of(k).size()); }
    int total() const {
        int n = 0;
        for (const auto& v : by_kind) n += static_cast<int>(v.size());
        return n;
    }
};

// Non-maximum suppression over the heatmap channels. A pixel is a candidate
// iff its value exceeds nms_threshold and beats every neighbor in the
// nms_window x nms_window box; equal-valued neighbors are resolved in favor of
// the first pixel in row-major order. Positions are refined by a per-axis
// quadratic fit clamped to +-0.5 px. When use_occluded_candidates is set the
// occluded channels are scanned identically and occluded candidates within one
// grid pixel of a visible one of the same kind are suppressed.
CandidateSet extract_candidates(const FieldStack& stack, const AssocConfig& cfg);

}  // namespace paftrack
