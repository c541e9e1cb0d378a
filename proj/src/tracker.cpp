// SPDX-License-Identifier: Apache-2.0
#include "paftrack/tracker.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

namespace paftrack {

namespace {

constexpr int kIntegralSamples = 10;

// Mean TAF integral over joint kinds placed in both poses; -inf when the
// poses share no kinds or the stack has no temporal channels.
double affinity(const AssembledPose& pose, const AssembledPose& tail, const FieldStack& stack) {
    if (!stack.has_taf()) return -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int shared = 0;
    for (int j = 0; j < kJointCount; ++j) {
        const auto& cur = pose.joints[j];
        const auto& prev = tail.joints[j];
        if (!cur || !prev) continue;
        sum += taf_line_integral(cur->position, prev->position, stack.taf[2 * j],
                                 stack.taf[2 * j + 1], kIntegralSamples);
        ++shared;
    }
    if (shared == 0) return -std::numeric_limits<double>::infinity();
    return sum / shared;
}

}  // namespace

std::vector<AssembledPose> tracker_step(TrackerState& state, int frame_index,
                                        std::vector<AssembledPose> poses, const FieldStack& stack,
                                        const TrackerConfig& cfg) {
    std::vector<int> active;
    for (int t = 0; t < static_cast<int>(state.tracks.size()); ++t)
        if (state.tracks[t].state == Tracklet::State::active) active.push_back(t);

    struct Scored {
        double score;
        int pose;
        int track;
    };
    std::vector<Scored> scored;
    for (int p = 0; p < static_cast<int>(poses.size()); ++p) {
        for (int t : active) {
            const double a = affinity(poses[p], state.tracks[t].last_pose(), stack);
            if (a >= cfg.min_match_score) scored.push_back({a, p, t});
        }
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.pose != b.pose) return a.pose < b.pose;
        return a.track < b.track;
    });

    std::vector<bool> pose_taken(poses.size(), false);
    std::vector<bool> track_taken(state.tracks.size(), false);
    for (const Scored& s : scored) {
        if (pose_taken[s.pose] || track_taken[s.track]) continue;
        pose_taken[s.pose] = true;
        track_taken[s.track] = true;
        Tracklet& track = state.tracks[s.track];
        poses[s.pose].provisional_id = track.track_id;
        track.entries.emplace_back(frame_index, poses[s.pose]);
        track.age = 0;
    }

    for (int p = 0; p < static_cast<int>(poses.size()); ++p) {
        if (pose_taken[p]) continue;
        if (poses[p].joint_count() < cfg.min_joints_for_birth) {
            poses[p].provisional_id = -1;
            continue;
        }
        Tracklet fresh;
        fresh.track_id = state.next_id++;
        poses[p].provisional_id = fresh.track_id;
        fresh.entries.emplace_back(frame_index, poses[p]);
        state.tracks.push_back(std::move(fresh));
    }

    for (int t : active) {
        if (track_taken[t]) continue;
        Tracklet& track = state.tracks[t];
        ++track.age;
        if (track.age > cfg.max_age) track.state = Tracklet::State::terminated;
    }
    return poses;
}

}  // namespace paftrack
