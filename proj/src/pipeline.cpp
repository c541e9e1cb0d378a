// SPDX-License-Identifier: Apache-2.0
#include "paftrack/pipeline.hpp"

#include "paftrack/peaks.hpp"

namespace paftrack {

Detector::Detector(SkeletonTopology topo, AssocConfig cfg)
    : topo_(std::move(topo)), cfg_(cfg) {}

void Detector::reset() {
    prev_stack_.reset();
    prev_poses_.clear();
}

std::vector<AssembledPose> Detector::process(FieldStack stack) {
    const CandidateSet candidates = extract_candidates(stack, cfg_);
    TemporalContext ctx;
    ctx.previous_stack = prev_stack_ ? &*prev_stack_ : nullptr;
    ctx.previous_poses = prev_poses_;
    std::vector<AssembledPose> poses = assemble(candidates, stack, ctx, topo_, cfg_);
    prev_stack_ = std::move(stack);
    prev_poses_ = poses;
    return poses;
}

PipelineResult run_ground_truth_pipeline(const SequenceAnnotation& seq,
                                         const SkeletonTopology& topo, const PipelineConfig& cfg,
                                         bool with_tracking) {
    PipelineResult result;
    Detector detector(topo, cfg.assoc);
    TrackerState tracker;

    const int stride = std::max(1, seq.clip_stride);
    const FrameAnnotation* prev_frame = nullptr;
    for (std::size_t pos = 0; pos < seq.frames.size(); pos += stride) {
        const FrameAnnotation& frame = seq.frames[pos];
        const Grid grid = Grid::for_image(frame.image_width, frame.image_height, cfg.scale_factor);
        FieldStack stack = synth_stack(frame, prev_frame, grid, topo, cfg.synth);
        prev_frame = &frame;

        std::vector<AssembledPose> poses = detector.process(std::move(stack));
        if (with_tracking)
            poses = tracker_step(tracker, frame.frame_index, std::move(poses),
                                 *detector.last_stack(), cfg.tracker);
        result.detections.push_back({frame.frame_index, std::move(poses)});
    }
    if (with_tracking) result.tracklets = std::move(tracker.tracks);
    return result;
}

}  // namespace paftrack
