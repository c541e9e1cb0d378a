// SPDX-License-Identifier: Apache-2.0
#include "paftrack/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace paftrack {

namespace {

constexpr float kZeroMotionRadius = 1.0f;  // grid px, stationary-joint fallback

float bilinear(const Plane& p, float x, float y) {
    x = std::clamp(x, 0.0f, static_cast<float>(p.width - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(p.height - 1));
    const int x0 = std::min(static_cast<int>(x), p.width - 2 >= 0 ? p.width - 2 : 0);
    const int y0 = std::min(static_cast<int>(y), p.height - 2 >= 0 ? p.height - 2 : 0);
    const int x1 = std::min(x0 + 1, p.width - 1);
    const int y1 = std::min(y0 + 1, p.height - 1);
    const float fx = x - static_cast<float>(x0);
    const float fy = y - static_cast<float>(y0);
    const float top = p.at(x0, y0) * (1.0f - fx) + p.at(x1, y0) * fx;
    const float bot = p.at(x0, y1) * (1.0f - fx) + p.at(x1, y1) * fx;
    return top * (1.0f - fy) + bot * fy;
}

double directed_integral(Vec2f from, Vec2f to, Vec2f direction, const Plane& fx, const Plane& fy,
                         int samples) {
    const int n = std::max(1, samples);
    double acc = 0.0;
    const Vec2f span = to - from;
    for (int i = 0; i < n; ++i) {
        const float u = (static_cast<float>(i) + 0.5f) / static_cast<float>(n);
        const Vec2f p = from + span * u;
        acc += static_cast<double>(bilinear(fx, p.x, p.y)) * direction.x +
               static_cast<double>(bilinear(fy, p.x, p.y)) * direction.y;
    }
    return acc / n;
}

struct PoseBuilder {
    std::array<int, kJointCount> candidate{};  // -1 when unplaced
    double score = 0.0;
    bool alive = true;

    PoseBuilder() { candidate.fill(-1); }
};

}  // namespace

int AssembledPose::joint_count() const {
    int n = 0;
    for (const auto& j : joints)
        if (j) ++n;
    return n;
}

std::optional<Boxf> AssembledPose::bounding_box() const {
    std::optional<Boxf> box;
    for (const auto& j : joints) {
        if (!j) continue;
        if (!box)
            box = Boxf{j->position.x, j->position.y, j->position.x, j->position.y};
        else
            box->include(j->position);
    }
    return box;
}

Vec2f sample_field(const Plane& fx, const Plane& fy, Vec2f p) {
    return {bilinear(fx, p.x, p.y), bilinear(fy, p.x, p.y)};
}

double paf_line_integral(Vec2f a, Vec2f b, const Plane& fx, const Plane& fy, int samples) {
    const Vec2f d = b - a;
    const float len = d.norm();
    if (len == 0.0f) return 0.0;
    return directed_integral(a, b, d * (1.0f / len), fx, fy, samples);
}

double taf_line_integral(Vec2f d_t, Vec2f d_prev, const Plane& fx, const Plane& fy, int samples) {
    const Vec2f d = d_prev - d_t;
    const float len = d.norm();
    if (len == 0.0f) return 0.0;
    return directed_integral(d_t, d_prev, d * (1.0f / len), fx, fy, samples);
}

std::optional<WarpResult> warp_to_previous(const Candidate& c,
                                           std::span<const AssembledPose> prev_poses,
                                           const Plane& taf_x, const Plane& taf_y,
                                           const AssocConfig& cfg) {
    std::optional<WarpResult> best;
    std::optional<Vec2f> coincident;
    float coincident_dist = kZeroMotionRadius;
    for (const AssembledPose& pose : prev_poses) {
        const auto& joint = pose.joints[joint_index(c.kind)];
        if (!joint) continue;
        const auto box = pose.bounding_box();
        const float radius =
            static_cast<float>(cfg.search_radius_multiplier) * (box ? box->diagonal() : 0.0f);
        const float dist = (joint->position - c.position).norm();
        if (dist > radius) continue;
        const double g =
            taf_line_integral(c.position, joint->position, taf_x, taf_y, cfg.integral_samples);
        if (!best || g > best->score) best = WarpResult{joint->position, g};
        if (dist <= coincident_dist) {
            coincident = joint->position;
            coincident_dist = dist;
        }
    }
    if (best && best->score >= cfg.min_limb_score) return best;
    if (coincident) return WarpResult{*coincident, cfg.min_limb_score};
    return std::nullopt;
}

namespace {

bool temporal_context_usable(const FieldStack& current, const TemporalContext& prev, int limb_index,
                             const AssocConfig& cfg) {
    return cfg.temporal_weight > 0.0 && current.has_taf() && prev.previous_stack != nullptr &&
           !prev.previous_poses.empty() &&
           2 * limb_index + 1 < static_cast<int>(prev.previous_stack->paf.size());
}

// Spatial term plus the warped previous-frame term from precomputed warps.
double pair_score(Vec2f a, Vec2f b, int limb_index, const FieldStack& current,
                  const TemporalContext& prev, bool temporal,
                  const std::optional<WarpResult>& warp_a, const std::optional<WarpResult>& warp_b,
                  const AssocConfig& cfg) {
    double score = paf_line_integral(a, b, current.paf[2 * limb_index],
                                     current.paf[2 * limb_index + 1], cfg.integral_samples);
    if (temporal && warp_a && warp_b) {
        score += cfg.temporal_weight *
                 paf_line_integral(warp_a->position, warp_b->position,
                                   prev.previous_stack->paf[2 * limb_index],
                                   prev.previous_stack->paf[2 * limb_index + 1],
                                   cfg.integral_samples);
    }
    return score;
}

std::optional<WarpResult> warp_for(const Candidate& c, const FieldStack& current,
                                   const TemporalContext& prev, const AssocConfig& cfg) {
    const int j = joint_index(c.kind);
    return warp_to_previous(c, prev.previous_poses, current.taf[2 * j], current.taf[2 * j + 1],
                            cfg);
}

}  // namespace

double score_limb(const Candidate& a, const Candidate& b, int limb_index,
                  const FieldStack& current, const TemporalContext& prev, const AssocConfig& cfg) {
    const bool temporal = temporal_context_usable(current, prev, limb_index, cfg);
    const auto warp_a = temporal ? warp_for(a, current, prev, cfg) : std::nullopt;
    const auto warp_b = temporal ? warp_for(b, current, prev, cfg) : std::nullopt;
    return pair_score(a.position, b.position, limb_index, current, prev, temporal, warp_a, warp_b,
                      cfg);
}

std::vector<ScoredPair> greedy_match(std::vector<ScoredPair> pairs, bool* conflict_free) {
    std::sort(pairs.begin(), pairs.end(), [](const ScoredPair& a, const ScoredPair& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    std::vector<ScoredPair> accepted;
    std::vector<int> used_rows, used_cols;
    bool clean = true;
    for (const ScoredPair& p : pairs) {
        const bool row_used = std::find(used_rows.begin(), used_rows.end(), p.row) != used_rows.end();
        const bool col_used = std::find(used_cols.begin(), used_cols.end(), p.col) != used_cols.end();
        if (row_used || col_used) {
            clean = false;
            continue;
        }
        accepted.push_back(p);
        used_rows.push_back(p.row);
        used_cols.push_back(p.col);
    }
    if (conflict_free != nullptr) *conflict_free = clean;
    return accepted;
}

std::vector<AssembledPose> assemble(const CandidateSet& candidates, const FieldStack& current,
                                    const TemporalContext& prev, const SkeletonTopology& topo,
                                    const AssocConfig& cfg) {
    if (2 * topo.limb_count() != static_cast<int>(current.paf.size()))
        throw std::invalid_argument("assemble: PAF channel count does not match topology");

    // Previous-frame radius restriction: with temporal context, only candidates
    // near some previously assembled skeleton are considered for connections.
    const bool restrict_radius = !prev.previous_poses.empty();
    auto admissible = [&](const Candidate& c) {
        if (!restrict_radius) return true;
        for (const AssembledPose& pose : prev.previous_poses) {
            const auto box = pose.bounding_box();
            if (!box) continue;
            const float radius = static_cast<float>(cfg.search_radius_multiplier) * box->diagonal();
            if ((c.position - box->center()).norm() <= radius) return true;
        }
        return false;
    };

    // Admissibility and warps are per candidate, not per pair; compute once.
    const bool temporal = temporal_context_usable(current, prev, topo.limb_count() - 1, cfg);
    std::array<std::vector<char>, kJointCount> usable;
    std::array<std::vector<std::optional<WarpResult>>, kJointCount> warps;
    for (int j = 0; j < kJointCount; ++j) {
        const auto& list = candidates.by_kind[j];
        usable[j].resize(list.size());
        warps[j].resize(list.size());
        for (std::size_t m = 0; m < list.size(); ++m) {
            usable[j][m] = admissible(list[m]) ? 1 : 0;
            if (temporal && usable[j][m]) warps[j][m] = warp_for(list[m], current, prev, cfg);
        }
    }

    std::vector<PoseBuilder> builders;
    // owner[j][m] = builder index holding candidate m of kind j, or -1.
    std::array<std::vector<int>, kJointCount> owner;
    for (int j = 0; j < kJointCount; ++j) owner[j].assign(candidates.by_kind[j].size(), -1);

    for (int c = 0; c < topo.limb_count(); ++c) {
        const int ja = joint_index(topo.limbs[c].a);
        const int jb = joint_index(topo.limbs[c].b);
        const auto& list_a = candidates.by_kind[ja];
        const auto& list_b = candidates.by_kind[jb];

        std::vector<ScoredPair> pairs;
        for (int m = 0; m < static_cast<int>(list_a.size()); ++m) {
            if (!usable[ja][m]) continue;
            for (int n = 0; n < static_cast<int>(list_b.size()); ++n) {
                if (!usable[jb][n]) continue;
                const double s = pair_score(list_a[m].position, list_b[n].position, c, current,
                                            prev, temporal, warps[ja][m], warps[jb][n], cfg);
                if (s > cfg.min_limb_score) pairs.push_back({m, n, s});
            }
        }
        const std::vector<ScoredPair> accepted = greedy_match(std::move(pairs));

        for (const ScoredPair& conn : accepted) {
            const int pa = owner[ja][conn.row];
            const int pb = owner[jb][conn.col];

            if (pa < 0 && pb < 0) {
                PoseBuilder fresh;
                fresh.candidate[ja] = conn.row;
                fresh.candidate[jb] = conn.col;
                fresh.score = conn.score;
                builders.push_back(fresh);
                owner[ja][conn.row] = owner[jb][conn.col] = static_cast<int>(builders.size()) - 1;
            } else if (pa >= 0 && pb < 0) {
                if (builders[pa].candidate[jb] != -1) continue;  // kind already taken
                builders[pa].candidate[jb] = conn.col;
                builders[pa].score += conn.score;
                owner[jb][conn.col] = pa;
            } else if (pa < 0 && pb >= 0) {
                if (builders[pb].candidate[ja] != -1) continue;
                builders[pb].candidate[ja] = conn.row;
                builders[pb].score += conn.score;
                owner[ja][conn.row] = pb;
            } else if (pa == pb) {
                builders[pa].score += conn.score;
            } else {
                // Merge two partial skeletons when they are kind-disjoint.
                bool disjoint = true;
                for (int j = 0; j < kJointCount; ++j)
                    if (builders[pa].candidate[j] != -1 && builders[pb].candidate[j] != -1) {
                        disjoint = false;
                        break;
                    }
                if (!disjoint) continue;
                for (int j = 0; j < kJointCount; ++j) {
                    const int cand = builders[pb].candidate[j];
                    if (cand != -1) {
                        builders[pa].candidate[j] = cand;
                        owner[j][cand] = pa;
                    }
                }
                builders[pa].score += builders[pb].score + conn.score;
                builders[pb].alive = false;
            }
        }
    }

    std::vector<AssembledPose> poses;
    for (const PoseBuilder& b : builders) {
        if (!b.alive) continue;
        AssembledPose pose;
        pose.total_score = b.score;
        for (int j = 0; j < kJointCount; ++j) {
            if (b.candidate[j] < 0) continue;
            const Candidate& cand = candidates.by_kind[j][b.candidate[j]];
            pose.joints[j] =
                PlacedJoint{cand.position, cand.score, cand.from_occluded_map, b.candidate[j]};
        }
        poses.push_back(std::move(pose));
    }

    // Strong isolated candidates become single-joint poses.
    for (int j = 0; j < kJointCount; ++j) {
        for (int m = 0; m < static_cast<int>(candidates.by_kind[j].size()); ++m) {
            if (owner[j][m] != -1) continue;
            const Candidate& cand = candidates.by_kind[j][m];
            if (cand.score < 0.8f) continue;
            AssembledPose pose;
            pose.joints[j] = PlacedJoint{cand.position, cand.score, cand.from_occluded_map, m};
            pose.total_score = 0.0;
            poses.push_back(std::move(pose));
        }
    }
    return poses;
}

}  // namespace paftrack
