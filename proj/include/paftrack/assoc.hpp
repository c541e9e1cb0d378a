// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "paftrack/peaks.hpp"
#include "paftrack/topology.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

struct PlacedJoint {
    Vec2f position;  // grid coordinates
    float score = 0.0f;
    bool from_occluded = false;
    int candidate_index = -1;  // index into the CandidateSet list of this kind
};

struct AssembledPose {
    std::array<std::optional<PlacedJoint>, kJointCount> joints;
    double total_score = 0.0;  // sum of accepted connection scores
    int provisional_id = -1;   // assigned by the tracker; -1 when unlabeled

    const std::optional<PlacedJoint>& joint(JointKind k) const { return joints[joint_index(k)]; }
    int joint_count() const;
    // Tight box over placed joints, grid coordinates; nullopt when empty.
    std::optional<Boxf> bounding_box() const;
};

struct LimbConnection {
    int limb_index = -1;
    int candidate_a = -1;  // index within the kind-a candidate list
    int candidate_b = -1;
    double score = 0.0;
};

// Bilinear sample of a vector field stored as separate x/y planes.
Vec2f sample_field(const Plane& fx, const Plane& fy, Vec2f p);

// Average over `samples` midpoint evaluations of field(p(u)) . (b-a)/|b-a|
// with u = (i + 0.5) / samples. Returns 0 when a == b.
double paf_line_integral(Vec2f a, Vec2f b, const Plane& fx, const Plane& fy, int samples);

// Same integral along the motion path, direction (d_prev - d_t)/|.|.
double taf_line_integral(Vec2f d_t, Vec2f d_prev, const Plane& fx, const Plane& fy, int samples);

// Previous-frame context for temporal scoring.
struct TemporalContext {
    const FieldStack* previous_stack = nullptr;  // for its PAF channels
    std::span<const AssembledPose> previous_poses;
};

struct WarpResult {
    Vec2f position;  // matching joint location at the previous frame
    double score = 0.0;
};

// Best same-kind previous joint under the TAF integral, restricted to joints
// within search_radius_multiplier times the owning pose's diagonal. When the
// best score falls below min_limb_score but a previous joint lies within one
// grid pixel, that joint is returned with score min_limb_score (zero-motion
// fallback for stationary people).
std::optional<WarpResult> warp_to_previous(const Candidate& c,
                                           std::span<const AssembledPose> prev_poses,
                                           const Plane& taf_x, const Plane& taf_y,
                                           const AssocConfig& cfg);

// Current-frame PAF integral plus temporal_weight times the previous-frame
// PAF integral between the warped endpoints. The temporal term vanishes when
// either warp fails or no previous context exists.
double score_limb(const Candidate& a, const Candidate& b, int limb_index,
                  const FieldStack& current, const TemporalContext& prev, const AssocConfig& cfg);

// Greedy one-to-one matching over scored pairs, highest score first. Ties are
// broken by (row, col). When `conflict_free` is given it is set to true iff no
// pair was ever rejected because an endpoint was already taken, in which case
// the greedy result is exactly the optimum over the given pairs.
struct ScoredPair {
    int row = -1;
    int col = -1;
    double score = 0.0;
};
std::vector<ScoredPair> greedy_match(std::vector<ScoredPair> pairs, bool* conflict_free = nullptr);

// Scores all candidate pairs per limb, greedily accepts connections, and
// merges them into skeletons over the topology tree. Isolated candidates with
// heatmap score >= 0.8 become single-joint poses.
std::vector<AssembledPose> assemble(const CandidateSet& candidates, const FieldStack& current,
                                    const TemporalContext& prev, const SkeletonTopology& topo,
                                    const AssocConfig& cfg);

}  // namespace paftrack
