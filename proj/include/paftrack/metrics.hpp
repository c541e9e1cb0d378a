// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "paftrack/tracker.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

// Prediction view used by the evaluation stack: joints in image pixels.
struct PredPose {
    int id = -1;
    double score = 0.0;
    std::array<std::optional<Vec2f>, kJointCount> joints_px;

    int joint_count() const {
        int n = 0;
        for (const auto& j : joints_px)
            if (j) ++n;
        return n;
    }
};

PredPose to_pred_pose(const AssembledPose& pose, int scale_factor);
PredPose to_pred_pose(const PoseAnnotation& pose);

// Tight box over present joints expanded by 10% per side; nullopt when empty.
std::optional<Boxf> pose_box(const PredPose& pose);
std::optional<Boxf> gt_box(const PoseAnnotation& pose);  // all annotated joints

struct PckhCounts {
    std::array<long, kJointCount> correct{};
    std::array<long, kJointCount> total{};
    long skipped_persons = 0;  // gt persons without a head segment

    void add(const PckhCounts& o);
    double joint_percent(int k) const;
    double mean_percent() const;
};

// Head-normalized correctness for one frame. Predictions are matched to gt
// persons greedily by descending count of joints within the threshold; a
// joint is correct iff it lies within threshold_ratio times the gt head
// segment length of the gt joint.
PckhCounts pckh(const std::vector<PredPose>& preds, const FrameAnnotation& gt,
                double threshold_ratio = 0.5);

struct DetectionCounts {
    long tp = 0, fp = 0, fn = 0;

    void add(const DetectionCounts& o);
    double precision() const;
    double recall() const;
    double f1() const;
};

// Box detection at an IoU threshold; greedy matching, best overlap first.
DetectionCounts detection_metrics(const std::vector<PredPose>& preds, const FrameAnnotation& gt,
                                  double iou_threshold = 0.5);

struct IdBox {
    int id = 0;
    Boxf box;
};

struct ClearMotResult {
    double mota = 0;  // percent, may be negative
    double idf1 = 0;
    double mt = 0;  // percent of gt trajectories covered >= 80%
    double ml = 0;  // percent covered <= 20%
    long fp = 0, fn = 0, ids = 0, frag = 0;
    long gt_total = 0;
    long matches = 0;
};

// CLEAR MOT bookkeeping over positionally aligned frames. Correspondence is
// kept from the previous frame while IoU stays above threshold; remaining
// pairs are matched greedily. IDF1 uses an exact trajectory correspondence
// when both id sets have at most 10 entries, a greedy one otherwise.
ClearMotResult clear_mot(const std::vector<std::vector<IdBox>>& gt_frames,
                         const std::vector<std::vector<IdBox>>& hyp_frames,
                         double iou_threshold = 0.5);

ClearMotResult clear_mot(const std::vector<Tracklet>& tracklets, const SequenceAnnotation& gt,
                         int scale_factor, double iou_threshold = 0.5);

// Mean average precision of joint locations: per-kind AP over the score-ranked
// precision/recall curve with PCKh correctness at `pckh_ratio`.
double joint_map(const std::vector<std::vector<PredPose>>& preds,
                 const std::vector<const FrameAnnotation*>& gts, double pckh_ratio = 0.5);

struct EvalReport {
    std::array<double, kJointCount> pckh_per_joint{};
    double pckh_mean = 0;
    double joint_map = 0;
    double det_precision = 0, det_recall = 0, det_f1 = 0;
    double mota = 0, idf1 = 0, mt = 0, ml = 0;
    long fp = 0, fn = 0, ids = 0, frag = 0;
    long pckh_skipped = 0;
};

struct EvalOptions {
    double pckh_ratio = 0.5;
    double iou_threshold = 0.5;
    int stride = 1;  // evaluate gt frames whose index is a multiple of this
};

// Full evaluation of a prediction sequence (person_id = track id, optional
// pose scores) against ground truth. Frames are aligned by frame_index;
// prediction entries whose frame_index does not exist in the evaluated gt set
// are rejected.
EvalReport evaluate(const SequenceAnnotation& pred, const SequenceAnnotation& gt,
                    const EvalOptions& opt = {});

// Flat key-value rendering, one "name value" pair per line.
std::string report_to_kv_text(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace paftrack
