// SPDX-License-Identifier: Apache-2.0
#include "paftrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "paftrack/annotation_io.hpp"

namespace paftrack {

namespace {

constexpr float kBoxExpansion = 0.10f;  // per side, approximates body extent

std::optional<Boxf> tight_box(const std::array<std::optional<Vec2f>, kJointCount>& joints) {
    std::optional<Boxf> box;
    for (const auto& j : joints) {
        if (!j) continue;
        if (!box)
            box = Boxf{j->x, j->y, j->x, j->y};
        else
            box->include(*j);
    }
    if (box) *box = box->expanded(kBoxExpansion);
    return box;
}

// Head segment length in image pixels; nullopt when either endpoint is missing.
std::optional<float> head_length(const PoseAnnotation& pose) {
    const auto& head = pose.keypoint(JointKind::head_top);
    const auto& neck = pose.keypoint(JointKind::neck);
    if (!head || !neck) return std::nullopt;
    return (head->position_px - neck->position_px).norm();
}

struct GreedyPair {
    double value;
    int row, col;
};

// Greedy descending one-to-one matching; ties resolved by (row, col).
std::vector<std::pair<int, int>> greedy_pairs(std::vector<GreedyPair> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const GreedyPair& a, const GreedyPair& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    std::vector<std::pair<int, int>> out;
    std::set<int> rows, cols;
    for (const GreedyPair& p : pairs) {
        if (rows.count(p.row) || cols.count(p.col)) continue;
        rows.insert(p.row);
        cols.insert(p.col);
        out.emplace_back(p.row, p.col);
    }
    return out;
}

double percent(double num, double den) { return den > 0 ? 100.0 * num / den : 0.0; }

}  // namespace

PredPose to_pred_pose(const AssembledPose& pose, int scale_factor) {
    PredPose out;
    out.id = pose.provisional_id;
    out.score = pose.total_score;
    const float s = static_cast<float>(scale_factor);
    for (int j = 0; j < kJointCount; ++j)
        if (pose.joints[j]) out.joints_px[j] = pose.joints[j]->position * s;
    return out;
}

PredPose to_pred_pose(const PoseAnnotation& pose) {
    PredPose out;
    out.id = pose.person_id;
    out.score = pose.score.value_or(0.0);
    for (int j = 0; j < kJointCount; ++j)
        if (pose.keypoints[j]) out.joints_px[j] = pose.keypoints[j]->position_px;
    return out;
}

std::optional<Boxf> pose_box(const PredPose& pose) { return tight_box(pose.joints_px); }

std::optional<Boxf> gt_box(const PoseAnnotation& pose) {
    std::array<std::optional<Vec2f>, kJointCount> joints;
    for (int j = 0; j < kJointCount; ++j)
        if (pose.keypoints[j]) joints[j] = pose.keypoints[j]->position_px;
    return tight_box(joints);
}

void PckhCounts::add(const PckhCounts& o) {
    for (int j = 0; j < kJointCount; ++j) {
        correct[j] += o.correct[j];
        total[j] += o.total[j];
    }
    skipped_persons += o.skipped_persons;
}

double PckhCounts::joint_percent(int k) const {
    return percent(static_cast<double>(correct[k]), static_cast<double>(total[k]));
}

double PckhCounts::mean_percent() const {
    double sum = 0;
    int kinds = 0;
    for (int j = 0; j < kJointCount; ++j) {
        if (total[j] == 0) continue;
        sum += joint_percent(j);
        ++kinds;
    }
    return kinds > 0 ? sum / kinds : 0.0;
}

PckhCounts pckh(const std::vector<PredPose>& preds, const FrameAnnotation& gt,
                double threshold_ratio) {
    PckhCounts counts;
    std::vector<const PoseAnnotation*> persons;
    std::vector<float> thresholds;
    for (const PoseAnnotation& pose : gt.poses) {
        const auto head = head_length(pose);
        if (!head) {
            ++counts.skipped_persons;
            continue;
        }
        persons.push_back(&pose);
        thresholds.push_back(static_cast<float>(threshold_ratio) * *head);
    }

    auto correct_count = [&](const PredPose& pred, int g) {
        int n = 0;
        for (int j = 0; j < kJointCount; ++j) {
            const auto& gt_kp = persons[g]->keypoints[j];
            const auto& pr = pred.joints_px[j];
            if (gt_kp && pr && (*pr - gt_kp->position_px).norm() <= thresholds[g]) ++n;
        }
        return n;
    };

    std::vector<GreedyPair> pairs;
    for (int p = 0; p < static_cast<int>(preds.size()); ++p)
        for (int g = 0; g < static_cast<int>(persons.size()); ++g)
            pairs.push_back({static_cast<double>(correct_count(preds[p], g)), p, g});

    std::vector<int> matched_pred(persons.size(), -1);
    for (const auto& [p, g] : greedy_pairs(std::move(pairs))) matched_pred[g] = p;

    for (int g = 0; g < static_cast<int>(persons.size()); ++g) {
        for (int j = 0; j < kJointCount; ++j) {
            const auto& gt_kp = persons[g]->keypoints[j];
            if (!gt_kp) continue;
            ++counts.total[j];
            if (matched_pred[g] < 0) continue;
            const auto& pr = preds[matched_pred[g]].joints_px[j];
            if (pr && (*pr - gt_kp->position_px).norm() <= thresholds[g]) ++counts.correct[j];
        }
    }
    return counts;
}

void DetectionCounts::add(const DetectionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
}

double DetectionCounts::precision() const { return percent(tp, tp + fp); }
double DetectionCounts::recall() const { return percent(tp, tp + fn); }
double DetectionCounts::f1() const {
    const double p = precision();
    const double r = recall();
    return (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

DetectionCounts detection_metrics(const std::vector<PredPose>& preds, const FrameAnnotation& gt,
                                  double iou_threshold) {
    std::vector<Boxf> pred_boxes, gt_boxes;
    for (const PredPose& p : preds)
        if (const auto b = pose_box(p)) pred_boxes.push_back(*b);
    for (const PoseAnnotation& p : gt.poses)
        if (const auto b = gt_box(p)) gt_boxes.push_back(*b);

    std::vector<GreedyPair> pairs;
    for (int p = 0; p < static_cast<int>(pred_boxes.size()); ++p)
        for (int g = 0; g < static_cast<int>(gt_boxes.size()); ++g) {
            const double v = iou(pred_boxes[p], gt_boxes[g]);
            if (v >= iou_threshold) pairs.push_back({v, p, g});
        }
    const auto matches = greedy_pairs(std::move(pairs));

    DetectionCounts counts;
    counts.tp = static_cast<long>(matches.size());
    counts.fp = static_cast<long>(pred_boxes.size()) - counts.tp;
    counts.fn = static_cast<long>(gt_boxes.size()) - counts.tp;
    return counts;
}

namespace {

struct TrajectoryStats {
    long present = 0;
    long matched = 0;
    bool ever_matched = false;
    bool in_gap = false;  // matched before, currently unmatched
    long frags = 0;
};

// Exact maximum-overlap trajectory correspondence via bitmask DP over the
// hypothesis ids; used when both id sets are small.
long best_id_overlap_exact(const std::vector<std::vector<long>>& overlap) {
    const int n_gt = static_cast<int>(overlap.size());
    const int n_hyp = n_gt > 0 ? static_cast<int>(overlap[0].size()) : 0;
    std::vector<std::vector<long>> dp(n_gt + 1, std::vector<long>(1u << n_hyp, -1));
    dp[0][0] = 0;
    long best = 0;
    for (int g = 0; g < n_gt; ++g) {
        for (unsigned mask = 0; mask < (1u << n_hyp); ++mask) {
            if (dp[g][mask] < 0) continue;
            // Leave gt trajectory g unmatched.
            dp[g + 1][mask] = std::max(dp[g + 1][mask], dp[g][mask]);
            for (int h = 0; h < n_hyp; ++h) {
                if (mask & (1u << h)) continue;
                const unsigned next = mask | (1u << h);
                dp[g + 1][next] = std::max(dp[g + 1][next], dp[g][mask] + overlap[g][h]);
            }
        }
    }
    for (long v : dp[n_gt]) best = std::max(best, v);
    return best;
}

long best_id_overlap_greedy(const std::vector<std::vector<long>>& overlap) {
    std::vector<GreedyPair> pairs;
    for (int g = 0; g < static_cast<int>(overlap.size()); ++g)
        for (int h = 0; h < static_cast<int>(overlap[g].size()); ++h)
            if (overlap[g][h] > 0) pairs.push_back({static_cast<double>(overlap[g][h]), g, h});
    long total = 0;
    for (const auto& [g, h] : greedy_pairs(std::move(pairs))) total += overlap[g][h];
    return total;
}

}  // namespace

ClearMotResult clear_mot(const std::vector<std::vector<IdBox>>& gt_frames,
                         const std::vector<std::vector<IdBox>>& hyp_frames,
                         double iou_threshold) {
    if (gt_frames.size() != hyp_frames.size())
        throw std::invalid_argument("clear_mot: gt and hypothesis frame counts differ");

    ClearMotResult r;
    std::map<int, int> last_match;  // gt id -> hyp id, persists across gaps
    std::map<int, TrajectoryStats> trajectories;
    std::map<int, std::map<int, long>> overlap_count;  // gt id -> hyp id -> frames
    std::set<int> hyp_ids_seen;
    long hyp_total = 0;

    for (std::size_t f = 0; f < gt_frames.size(); ++f) {
        const auto& gts = gt_frames[f];
        const auto& hyps = hyp_frames[f];
        r.gt_total += static_cast<long>(gts.size());
        hyp_total += static_cast<long>(hyps.size());
        for (const IdBox& h : hyps) hyp_ids_seen.insert(h.id);

        // Identity-independent overlap tallies for IDF1.
        for (const IdBox& g : gts)
            for (const IdBox& h : hyps)
                if (iou(g.box, h.box) >= iou_threshold) ++overlap_count[g.id][h.id];

        std::vector<bool> gt_used(gts.size(), false);
        std::vector<bool> hyp_used(hyps.size(), false);
        std::vector<std::pair<int, int>> matches;  // (gt index, hyp index)

        // Keep previous correspondences that still overlap.
        for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
            const auto it = last_match.find(gts[g].id);
            if (it == last_match.end()) continue;
            for (int h = 0; h < static_cast<int>(hyps.size()); ++h) {
                if (hyp_used[h] || hyps[h].id != it->second) continue;
                if (iou(gts[g].box, hyps[h].box) >= iou_threshold) {
                    matches.emplace_back(g, h);
                    gt_used[g] = true;
                    hyp_used[h] = true;
                }
                break;
            }
        }

        // Greedy IoU for the rest.
        std::vector<GreedyPair> pairs;
        for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
            if (gt_used[g]) continue;
            for (int h = 0; h < static_cast<int>(hyps.size()); ++h) {
                if (hyp_used[h]) continue;
                const double v = iou(gts[g].box, hyps[h].box);
                if (v >= iou_threshold) pairs.push_back({v, g, h});
            }
        }
        for (const auto& [g, h] : greedy_pairs(std::move(pairs))) {
            matches.emplace_back(g, h);
            gt_used[g] = true;
            hyp_used[h] = true;
        }

        for (const auto& [g, h] : matches) {
            const int gt_id = gts[g].id;
            const int hyp_id = hyps[h].id;
            const auto it = last_match.find(gt_id);
            if (it != last_match.end() && it->second != hyp_id) ++r.ids;
            last_match[gt_id] = hyp_id;
        }
        r.matches += static_cast<long>(matches.size());
        r.fn += static_cast<long>(gts.size() - matches.size());
        r.fp += static_cast<long>(hyps.size() - matches.size());

        for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
            TrajectoryStats& stats = trajectories[gts[g].id];
            ++stats.present;
            if (gt_used[g]) {
                ++stats.matched;
                if (stats.in_gap) ++stats.frags;  // resumed after an interruption
                stats.ever_matched = true;
                stats.in_gap = false;
            } else if (stats.ever_matched) {
                stats.in_gap = true;
            }
        }
    }

    r.mota = r.gt_total > 0
                 ? 100.0 * (1.0 - static_cast<double>(r.fp + r.fn + r.ids) / r.gt_total)
                 : 0.0;

    long mostly_tracked = 0, mostly_lost = 0;
    for (const auto& [id, stats] : trajectories) {
        const double coverage =
            stats.present > 0 ? static_cast<double>(stats.matched) / stats.present : 0.0;
        if (coverage >= 0.8) ++mostly_tracked;
        if (coverage <= 0.2) ++mostly_lost;
        r.frag += stats.frags;
    }
    r.mt = percent(mostly_tracked, trajectories.size());
    r.ml = percent(mostly_lost, trajectories.size());

    // IDF1 over the trajectory-level id correspondence.
    std::vector<int> gt_ids, hyp_ids(hyp_ids_seen.begin(), hyp_ids_seen.end());
    for (const auto& [id, stats] : trajectories) gt_ids.push_back(id);
    std::vector<std::vector<long>> overlap(gt_ids.size(), std::vector<long>(hyp_ids.size(), 0));
    for (std::size_t g = 0; g < gt_ids.size(); ++g)
        for (std::size_t h = 0; h < hyp_ids.size(); ++h) {
            const auto git = overlap_count.find(gt_ids[g]);
            if (git == overlap_count.end()) continue;
            const auto hit = git->second.find(hyp_ids[h]);
            if (hit != git->second.end()) overlap[g][h] = hit->second;
        }
    const long idtp = (gt_ids.size() <= 10 && hyp_ids.size() <= 10)
                          ? best_id_overlap_exact(overlap)
                          : best_id_overlap_greedy(overlap);
    const long denom = r.gt_total + hyp_total;
    r.idf1 = denom > 0 ? 100.0 * 2.0 * idtp / denom : 0.0;
    return r;
}

ClearMotResult clear_mot(const std::vector<Tracklet>& tracklets, const SequenceAnnotation& gt,
                         int scale_factor, double iou_threshold) {
    std::map<int, std::vector<IdBox>> hyp_by_frame;
    for (const Tracklet& track : tracklets) {
        for (const auto& [frame, pose] : track.entries) {
            const PredPose pred = to_pred_pose(pose, scale_factor);
            if (const auto box = pose_box(pred)) hyp_by_frame[frame].push_back({track.track_id, *box});
        }
    }
    std::vector<std::vector<IdBox>> gt_frames, hyp_frames;
    for (const FrameAnnotation& frame : gt.frames) {
        std::vector<IdBox> gts;
        for (const PoseAnnotation& pose : frame.poses)
            if (const auto box = gt_box(pose)) gts.push_back({pose.person_id, *box});
        gt_frames.push_back(std::move(gts));
        const auto it = hyp_by_frame.find(frame.frame_index);
        hyp_frames.push_back(it != hyp_by_frame.end() ? it->second : std::vector<IdBox>{});
    }
    return clear_mot(gt_frames, hyp_frames, iou_threshold);
}

double joint_map(const std::vector<std::vector<PredPose>>& preds,
                 const std::vector<const FrameAnnotation*>& gts, double pckh_ratio) {
    if (preds.size() != gts.size())
        throw std::invalid_argument("joint_map: frame counts differ");

    double ap_sum = 0.0;
    int kinds = 0;
    for (int j = 0; j < kJointCount; ++j) {
        struct GtJoint {
            Vec2f position;
            float threshold;
            bool matched = false;
        };
        std::vector<std::vector<GtJoint>> gt_joints(gts.size());
        long num_gt = 0;
        for (std::size_t f = 0; f < gts.size(); ++f) {
            for (const PoseAnnotation& pose : gts[f]->poses) {
                const auto head = head_length(pose);
                if (!head) continue;
                const auto& kp = pose.keypoints[j];
                if (!kp) continue;
                gt_joints[f].push_back(
                    {kp->position_px, static_cast<float>(pckh_ratio) * *head});
                ++num_gt;
            }
        }
        if (num_gt == 0) continue;
        ++kinds;

        struct Prediction {
            double score;
            std::size_t frame;
            Vec2f position;
        };
        std::vector<Prediction> ranked;
        for (std::size_t f = 0; f < preds.size(); ++f)
            for (const PredPose& pose : preds[f])
                if (pose.joints_px[j]) ranked.push_back({pose.score, f, *pose.joints_px[j]});
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const Prediction& a, const Prediction& b) { return a.score > b.score; });

        double ap = 0.0;
        long tp = 0;
        for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
            const Prediction& pred = ranked[rank];
            int best = -1;
            float best_dist = 0.0f;
            auto& joints = gt_joints[pred.frame];
            for (int g = 0; g < static_cast<int>(joints.size()); ++g) {
                if (joints[g].matched) continue;
                const float dist = (pred.position - joints[g].position).norm();
                if (dist <= joints[g].threshold && (best < 0 || dist < best_dist)) {
                    best = g;
                    best_dist = dist;
                }
            }
            if (best >= 0) {
                joints[best].matched = true;
                ++tp;
                ap += static_cast<double>(tp) / static_cast<double>(rank + 1);
            }
        }
        ap_sum += ap / static_cast<double>(num_gt);
    }
    return kinds > 0 ? 100.0 * ap_sum / kinds : 0.0;
}

EvalReport evaluate(const SequenceAnnotation& pred, const SequenceAnnotation& gt,
                    const EvalOptions& opt) {
    std::map<int, const FrameAnnotation*> pred_by_index;
    for (const FrameAnnotation& frame : pred.frames) pred_by_index[frame.frame_index] = &frame;

    std::vector<const FrameAnnotation*> gt_frames;
    for (const FrameAnnotation& frame : gt.frames)
        if (opt.stride <= 1 || frame.frame_index % opt.stride == 0) gt_frames.push_back(&frame);

    std::set<int> gt_indices;
    for (const FrameAnnotation* frame : gt_frames) gt_indices.insert(frame->frame_index);
    for (const FrameAnnotation& frame : pred.frames)
        if (!gt_indices.count(frame.frame_index))
            throw std::invalid_argument("evaluate: prediction frame " +
                                        std::to_string(frame.frame_index) +
                                        " has no ground-truth counterpart");

    PckhCounts pckh_counts;
    DetectionCounts det_counts;
    std::vector<std::vector<PredPose>> pred_frames;
    std::vector<std::vector<IdBox>> gt_boxes, hyp_boxes;

    for (const FrameAnnotation* gt_frame : gt_frames) {
        std::vector<PredPose> pred_poses;
        const auto it = pred_by_index.find(gt_frame->frame_index);
        if (it != pred_by_index.end())
            for (const PoseAnnotation& pose : it->second->poses)
                pred_poses.push_back(to_pred_pose(pose));

        pckh_counts.add(pckh(pred_poses, *gt_frame, opt.pckh_ratio));
        det_counts.add(detection_metrics(pred_poses, *gt_frame, opt.iou_threshold));

        std::vector<IdBox> gts, hyps;
        for (const PoseAnnotation& pose : gt_frame->poses)
            if (const auto box = gt_box(pose)) gts.push_back({pose.person_id, *box});
        for (const PredPose& pose : pred_poses)
            if (const auto box = pose_box(pose)) hyps.push_back({pose.id, *box});
        gt_boxes.push_back(std::move(gts));
        hyp_boxes.push_back(std::move(hyps));
        pred_frames.push_back(std::move(pred_poses));
    }

    const ClearMotResult mot = clear_mot(gt_boxes, hyp_boxes, opt.iou_threshold);

    EvalReport report;
    for (int j = 0; j < kJointCount; ++j) report.pckh_per_joint[j] = pckh_counts.joint_percent(j);
    report.pckh_mean = pckh_counts.mean_percent();
    report.pckh_skipped = pckh_counts.skipped_persons;
    report.joint_map = joint_map(pred_frames, gt_frames, opt.pckh_ratio);
    report.det_precision = det_counts.precision();
    report.det_recall = det_counts.recall();
    report.det_f1 = det_counts.f1();
    report.mota = mot.mota;
    report.idf1 = mot.idf1;
    report.mt = mot.mt;
    report.ml = mot.ml;
    report.fp = mot.fp;
    report.fn = mot.fn;
    report.ids = mot.ids;
    report.frag = mot.frag;
    return report;
}

std::string report_to_kv_text(const EvalReport& report) {
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += ' ';
        out += value;
        out += '\n';
    };
    line("pckh_mean", format_g6(report.pckh_mean));
    for (int j = 0; j < kJointCount; ++j)
        line("pckh_" + std::string(joint_name(static_cast<JointKind>(j))),
             format_g6(report.pckh_per_joint[j]));
    line("pckh_skipped", std::to_string(report.pckh_skipped));
    line("joint_map", format_g6(report.joint_map));
    line("det_precision", format_g6(report.det_precision));
    line("det_recall", format_g6(report.det_recall));
    line("det_f1", format_g6(report.det_f1));
    line("mota", format_g6(report.mota));
    line("idf1", format_g6(report.idf1));
    line("mt", format_g6(report.mt));
    line("ml", format_g6(report.ml));
    line("fp", std::to_string(report.fp));
    line("fn", std::to_string(report.fn));
    line("ids", std::to_string(report.ids));
    line("frag", std::to_string(report.frag));
    return out;
}

std::string report_to_json(const EvalReport& report) {
    std::string out = "{\n";
    out += "  \"type\": \"eval_report\",\n  \"version\": 1,\n";
    out += "  \"pckh_mean\": " + format_g6(report.pckh_mean) + ",\n";
    out += "  \"pckh_per_joint\": [";
    for (int j = 0; j < kJointCount; ++j) {
        if (j) out += ", ";
        out += format_g6(report.pckh_per_joint[j]);
    }
    out += "],\n";
    out += "  \"pckh_skipped\": " + std::to_string(report.pckh_skipped) + ",\n";
    out += "  \"joint_map\": " + format_g6(report.joint_map) + ",\n";
    out += "  \"det_precision\": " + format_g6(report.det_precision) + ",\n";
    out += "  \"det_recall\": " + format_g6(report.det_recall) + ",\n";
    out += "  \"det_f1\": " + format_g6(report.det_f1) + ",\n";
    out += "  \"mota\": " + format_g6(report.mota) + ",\n";
    out += "  \"idf1\": " + format_g6(report.idf1) + ",\n";
    out += "  \"mt\": " + format_g6(report.mt) + ",\n";
    out += "  \"ml\": " + format_g6(report.ml) + ",\n";
    out += "  \"fp\": " + std::to_string(report.fp) + ",\n";
    out += "  \"fn\": " + std::to_string(report.fn) + ",\n";
    out += "  \"ids\": " + std::to_string(report.ids) + ",\n";
    out += "  \"frag\": " + std::to_string(report.frag) + "\n";
    out += "}\n";
    return out;
}

}  // namespace paftrack
