// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "paftrack/assoc.hpp"
#include "paftrack/field_synth.hpp"
#include "paftrack/tracker.hpp"

namespace paftrack {

// Stateful candidate extraction + skeleton assembly over an ordered stack
// sequence. Keeps the previous stack and poses for temporal scoring.
class Detector {
 public:
    Detector(SkeletonTopology topo, AssocConfig cfg);

    std::vector<AssembledPose> process(FieldStack stack);
    const std::vector<AssembledPose>& previous_poses() const { return prev_poses_; }
    // The most recently processed stack; null before the first frame.
    const FieldStack* last_stack() const { return prev_stack_ ? &*prev_stack_ : nullptr; }
    void reset();

 private:
    SkeletonTopology topo_;
    AssocConfig cfg_;
    std::optional<FieldStack> prev_stack_;
    std::vector<AssembledPose> prev_poses_;
};

struct FramePoses {
    int frame_index = 0;
    std::vector<AssembledPose> poses;
};

struct PipelineConfig {
    SynthConfig synth;
    AssocConfig assoc;
    TrackerConfig tracker;
    int scale_factor = 8;
};

struct PipelineResult {
    std::vector<FramePoses> detections;  // tracker-labeled when tracking ran
    std::vector<Tracklet> tracklets;     // empty when tracking was disabled
};

// Synthesizes stacks from the annotations and runs detection (and tracking
// unless with_tracking is false) over the frames at the sequence's clip
// stride. This is the end-to-end round-trip harness.
PipelineResult run_ground_truth_pipeline(const SequenceAnnotation& seq,
                                         const SkeletonTopology& topo, const PipelineConfig& cfg,
                                         bool with_tracking = true);

}  // namespace paftrack
