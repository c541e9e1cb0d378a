// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "paftrack/assoc.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

struct TrackerConfig {
    int max_age = 1;              // frames a track survives unmatched
    double min_match_score = 0.1;
    int min_joints_for_birth = 3;
};

struct Tracklet {
    enum class State { active, terminated };

    int track_id = 0;  // positive, never reused
    std::vector<std::pair<int, AssembledPose>> entries;  // (frame_index, pose)
    State state = State::active;
    int age = 0;  // consecutive unmatched steps

    const AssembledPose& last_pose() const { return entries.back().second; }
};

struct TrackerState {
    int next_id = 1;
    std::vector<Tracklet> tracks;
};

// One association step. Pose-to-track affinity is the mean TAF integral over
// joint kinds placed in both the pose and the track's last pose; matching is
// greedy descending with a one-to-one constraint. Unmatched poses with enough
// joints start new tracks; unmatched tracks age and terminate past max_age.
// Returns the input poses with provisional_id set (-1 for unlabeled poses).
// Must be called in frame order; the stack's TAF channels must link the
// current frame to the previously processed one.
std::vector<AssembledPose> tracker_step(TrackerState& state, int frame_index,
                                        std::vector<AssembledPose> poses, const FieldStack& stack,
                                        const TrackerConfig& cfg);

}  // namespace paftrack
