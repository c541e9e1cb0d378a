// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "paftrack/topology.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

struct LossReport {
    double l_heatmap = 0;
    double l_occluded = 0;
    double l_paf = 0;
    double l_taf = 0;
    double total = 0;  // always the exact sum of the four terms
};

// Peak spread in grid pixels as a function of camera distance in meters.
double peak_sigma(double camera_distance_m, double alpha_sigma);

struct Heatmaps {
    std::vector<Plane> visible;
    std::vector<Plane> occluded;
};

// Distance-conditioned Gaussian peaks, max-combined over people. Occluded and
// self-occluded keypoints go to the occluded channel set.
Heatmaps synth_heatmaps(const FrameAnnotation& frame, const Grid& grid, const SynthConfig& cfg);

// Unit vectors along each limb within paf_half_width of the segment,
// averaged over the people covering each pixel.
std::vector<Plane> synth_pafs(const FrameAnnotation& frame, const Grid& grid,
                              const SkeletonTopology& topo, const SynthConfig& cfg);

// Unit vectors pointing from each joint's time-t location toward its
// time-(t-1) location, rasterized like PAFs. People are matched by person_id.
std::vector<Plane> synth_tafs(const FrameAnnotation& prev, const FrameAnnotation& curr,
                              const Grid& grid, const SynthConfig& cfg);

Plane synth_mask(const FrameAnnotation& frame, const Grid& grid, const SynthConfig& cfg);

// Full stack for one frame; `prev` may be nullptr, in which case the stack
// carries no TAF channels.
FieldStack synth_stack(const FrameAnnotation& frame, const FrameAnnotation* prev, const Grid& grid,
                       const SkeletonTopology& topo, const SynthConfig& cfg);

// Mask-weighted squared error between two stacks, using the truth's mask.
// The TAF term is zero when either stack lacks TAF channels.
LossReport masked_sse_loss(const FieldStack& pred, const FieldStack& truth);

}  // namespace paftrack
