// SPDX-License-Identifier: Apache-2.0
#include "paftrack/validate.hpp"

#include <cmath>
#include <set>
#include <string>

namespace paftrack {

namespace {

std::string joint_tag(int person_id, int k) {
    return "person " + std::to_string(person_id) + " joint " +
           std::string(joint_name(static_cast<JointKind>(k)));
}

}  // namespace

std::vector<Violation> validate_sequence(const SequenceAnnotation& seq) {
    std::vector<Violation> out;
    if (seq.clip_stride < 1)
        out.push_back({-1, "clip_stride must be >= 1, got " + std::to_string(seq.clip_stride)});
    if (seq.clip_length < 2)
        out.push_back({-1, "clip_length must be >= 2, got " + std::to_string(seq.clip_length)});
    if (!(seq.fps > 0)) out.push_back({-1, "fps must be positive"});

    int prev_index = -1;
    bool first = true;
    for (const FrameAnnotation& frame : seq.frames) {
        const int f = frame.frame_index;
        if (f < 0) out.push_back({f, "negative frame_index"});
        if (!first && f <= prev_index)
            out.push_back({f, "frame indices must be strictly increasing"});
        first = false;
        prev_index = f;

        if (frame.image_width <= 0 || frame.image_height <= 0)
            out.push_back({f, "non-positive image size"});

        std::set<int> ids;
        for (const PoseAnnotation& pose : frame.poses) {
            if (pose.person_id < 0)
                out.push_back({f, "negative person_id " + std::to_string(pose.person_id)});
            if (!ids.insert(pose.person_id).second)
                out.push_back({f, "duplicate person_id " + std::to_string(pose.person_id)});

            for (int k = 0; k < kJointCount; ++k) {
                const auto& kp = pose.keypoints[k];
                if (!kp) continue;
                if (!std::isfinite(kp->position_px.x) || !std::isfinite(kp->position_px.y))
                    out.push_back({f, joint_tag(pose.person_id, k) + " has non-finite position"});
                else if (kp->position_px.x < 0 || kp->position_px.x >= frame.image_width ||
                         kp->position_px.y < 0 || kp->position_px.y >= frame.image_height)
                    out.push_back({f, joint_tag(pose.person_id, k) + " out of bounds at (" +
                                          std::to_string(kp->position_px.x) + ", " +
                                          std::to_string(kp->position_px.y) + ")"});
                if (!(kp->camera_distance > 0) || !std::isfinite(kp->camera_distance))
                    out.push_back(
                        {f, joint_tag(pose.person_id, k) + " camera_distance must be finite and positive"});
                if (kp->occluded && kp->self_occluded)
                    out.push_back(
                        {f, joint_tag(pose.person_id, k) + " cannot be both occluded and self-occluded"});
            }
        }
    }
    return out;
}

}  // namespace paftrack
