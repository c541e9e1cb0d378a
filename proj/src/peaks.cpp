// SPDX-License-Identifier: Apache-2.0
#include "paftrack/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paftrack {

namespace {

// Vertex of the parabola through (-1, l), (0, c), (1, r), clamped to +-0.5.
float quadratic_offset(float l, float c, float r) {
    const float denom = l - 2.0f * c + r;
    if (std::fabs(denom) < 1e-12f) return 0.0f;
    return std::clamp(0.5f * (l - r) / denom, -0.5f, 0.5f);
}

void scan_plane(const Plane& plane, JointKind kind, bool from_occluded, const AssocConfig& cfg,
                std::vector<Candidate>& out) {
    const int half = cfg.nms_window / 2;
    const float threshold = static_cast<float>(cfg.nms_threshold);
    for (int y = 0; y < plane.height; ++y) {
        for (int x = 0; x < plane.width; ++x) {
            const float v = plane.at(x, y);
            if (v <= threshold) continue;

            bool peak = true;
            for (int ny = std::max(0, y - half); peak && ny <= std::min(plane.height - 1, y + half);
                 ++ny) {
                for (int nx = std::max(0, x - half); nx <= std::min(plane.width - 1, x + half);
                     ++nx) {
                    if (nx == x && ny == y) continue;
                    const float nv = plane.at(nx, ny);
                    // Equal values: the first pixel in row-major order wins.
                    if (nv > v || (nv == v && (ny < y || (ny == y && nx < x)))) {
                        peak = false;
                        break;
                    }
                }
            }
            if (!peak) continue;

            float off_x = 0.0f, off_y = 0.0f;
            if (x > 0 && x < plane.width - 1)
                off_x = quadratic_offset(plane.at(x - 1, y), v, plane.at(x + 1, y));
            if (y > 0 && y < plane.height - 1)
                off_y = quadratic_offset(plane.at(x, y - 1), v, plane.at(x, y + 1));

            out.push_back(Candidate{kind,
                                    {static_cast<float>(x) + off_x, static_cast<float>(y) + off_y},
                                    v, from_occluded});
        }
    }
}

}  // namespace

CandidateSet extract_candidates(const FieldStack& stack, const AssocConfig& cfg) {
    if (static_cast<int>(stack.visible.size()) != kJointCount)
        throw std::invalid_argument("extract_candidates: stack must carry 14 visible channels");
    if (cfg.nms_window < 1 || cfg.nms_window % 2 == 0)
        throw std::invalid_argument("extract_candidates: nms_window must be a positive odd integer");

    CandidateSet set;
    for (int j = 0; j < kJointCount; ++j) {
        const JointKind kind = static_cast<JointKind>(j);
        auto& list = set.by_kind[j];
        scan_plane(stack.visible[j], kind, false, cfg, list);

        if (cfg.use_occluded_candidates && static_cast<int>(stack.occluded.size()) == kJointCount) {
            std::vector<Candidate> occluded;
            scan_plane(stack.occluded[j], kind, true, cfg, occluded);
            const std::size_t visible_count = list.size();
            for (const Candidate& oc : occluded) {
                bool suppressed = false;
                for (std::size_t i = 0; i < visible_count; ++i) {
                    if ((oc.position - list[i].position).norm() <= 1.0f) {
                        suppressed = true;
                        break;
                    }
                }
                if (!suppressed) list.push_back(oc);
            }
        }
    }
    return set;
}

}  // namespace paftrack
