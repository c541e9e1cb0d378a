// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "paftrack/types.hpp"

namespace paftrack {

struct SceneConfig {
    std::uint64_t seed = 0;
    int num_people_min = 1;
    int num_people_max = 20;
    int image_width = 1920;
    int image_height = 1080;
    double distance_min = 0.1;  // meters
    double distance_max = 100.0;
    double speed_min = 0.5;  // px/frame
    double speed_max = 2.0;
    double occluder_events = 0.0;  // expected rectangle occluders per sequence
    int duration = 30;             // frames
    int crossing_pairs = 0;        // deliberately crossing trajectory pairs
    double fps = 30.0;
    int clip_stride = 1;
    int clip_length = 8;
};

// Rigid walking template scaled by 1/distance, anchored at mid-body, with
// sinusoidal limb swing along the walk direction. Exposed for scale tests.
std::array<Vec2f, kJointCount> walking_pose(Vec2f anchor_px, double distance_m, double phase,
                                            double walk_sign);

// Deterministic synthetic pedestrian scene. People follow bouncing linear
// trajectories inside separated lanes; crossing pairs walk through each other
// mid-sequence. Joints covered by an occluder rectangle or by a nearer
// person's box are flagged occluded; out-of-frame joints are absent. The
// output always passes validate_sequence.
SequenceAnnotation generate(const SceneConfig& cfg);

}  // namespace paftrack
