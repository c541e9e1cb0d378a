// SPDX-License-Identifier: Apache-2.0
#include "paftrack/field_synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "paftrack/kernels.hpp"

namespace paftrack {

namespace {

constexpr double kTruncationSigmas = 3.0;

void check_grid(const FrameAnnotation& frame, const Grid& grid) {
    const Grid expected = Grid::for_image(frame.image_width, frame.image_height, grid.scale_factor);
    if (expected != grid)
        throw std::invalid_argument("field_synth: grid does not match frame image size");
}

Vec2f to_grid(Vec2f px, int scale) {
    const float s = static_cast<float>(scale);
    return {px.x / s, px.y / s};
}

// Gaussian peak max-merged into the plane, truncated at 3 sigma.
void splat_gaussian(Plane& plane, Vec2f center, double sigma) {
    const double radius = kTruncationSigmas * sigma;
    const float inv_sigma_sq = static_cast<float>(1.0 / (sigma * sigma));
    const int y0 = std::max(0, static_cast<int>(std::ceil(center.y - radius)));
    const int y1 = std::min(plane.height - 1, static_cast<int>(std::floor(center.y + radius)));
    const auto& k = kernels::ops();
    for (int y = y0; y <= y1; ++y) {
        const double dy = static_cast<double>(y) - static_cast<double>(center.y);
        const double span_sq = radius * radius - dy * dy;
        if (span_sq < 0) continue;
        const double half = std::sqrt(span_sq);
        const int x0 = std::max(0, static_cast<int>(std::ceil(center.x - half)));
        const int x1 = std::min(plane.width - 1, static_cast<int>(std::floor(center.x + half)));
        if (x1 < x0) continue;
        k.gaussian_row_max(plane.row(y) + x0, x1 - x0 + 1,
                           static_cast<float>(x0) - center.x, static_cast<float>(dy * dy),
                           inv_sigma_sq);
    }
}

// Adds `value` and a coverage count over every grid point within half_width
// of the segment [a, b]. A zero-length segment covers the disk around `a`.
void rasterize_segment(Plane& sum_x, Plane& sum_y, Plane& count, Vec2f a, Vec2f b, float half_width,
                       Vec2f value) {
    const Vec2f d = b - a;
    const float len = d.norm();
    const Vec2f dir = len > 0.0f ? d * (1.0f / len) : Vec2f{0.0f, 0.0f};
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half_width)));
    const int x1 = std::min(sum_x.width - 1,
                            static_cast<int>(std::ceil(std::max(a.x, b.x) + half_width)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half_width)));
    const int y1 = std::min(sum_x.height - 1,
                            static_cast<int>(std::ceil(std::max(a.y, b.y) + half_width)));
    if (x1 < x0 || y1 < y0) return;
    const int n = x1 - x0 + 1;
    const auto& k = kernels::ops();
    for (int y = y0; y <= y1; ++y) {
        k.segment_cover_row(sum_x.row(y) + x0, sum_y.row(y) + x0, count.row(y) + x0, n,
                            static_cast<float>(x0), static_cast<float>(y), a, dir, len,
                            half_width * half_width, value);
    }
}

void finalize_average(Plane& x, Plane& y, const Plane& count) {
    kernels::ops().average_where_covered(x.values.data(), y.values.data(), count.values.data(),
                                         count.size());
}

double plane_loss(const std::vector<Plane>& pred, const std::vector<Plane>& truth,
                  const Plane& mask) {
    double acc = 0.0;
    const auto& k = kernels::ops();
    for (std::size_t i = 0; i < pred.size(); ++i)
        acc += k.masked_sse(pred[i].values.data(), truth[i].values.data(), mask.values.data(),
                            mask.size());
    return acc;
}

}  // namespace

double peak_sigma(double camera_distance_m, double alpha_sigma) {
    return std::exp(1.0 - camera_distance_m / alpha_sigma);
}

Heatmaps synth_heatmaps(const FrameAnnotation& frame, const Grid& grid, const SynthConfig& cfg) {
    check_grid(frame, grid);
    Heatmaps out;
    out.visible.assign(kJointCount, Plane(grid.width, grid.height));
    out.occluded.assign(kJointCount, Plane(grid.width, grid.height));
    for (const PoseAnnotation& pose : frame.poses) {
        for (int j = 0; j < kJointCount; ++j) {
            const auto& kp = pose.keypoints[j];
            if (!kp) continue;
            const double sigma = peak_sigma(kp->camera_distance, cfg.alpha_sigma);
            Plane& target =
                (kp->occluded || kp->self_occluded) ? out.occluded[j] : out.visible[j];
            splat_gaussian(target, to_grid(kp->position_px, grid.scale_factor), sigma);
        }
    }
    return out;
}

std::vector<Plane> synth_pafs(const FrameAnnotation& frame, const Grid& grid,
                              const SkeletonTopology& topo, const SynthConfig& cfg) {
    check_grid(frame, grid);
    std::vector<Plane> paf(2 * topo.limb_count(), Plane(grid.width, grid.height));
    Plane count(grid.width, grid.height);
    const float hw = static_cast<float>(cfg.paf_half_width);
    for (int c = 0; c < topo.limb_count(); ++c) {
        std::fill(count.values.begin(), count.values.end(), 0.0f);
        Plane& px = paf[2 * c];
        Plane& py = paf[2 * c + 1];
        for (const PoseAnnotation& pose : frame.poses) {
            const auto& ka = pose.keypoint(topo.limbs[c].a);
            const auto& kb = pose.keypoint(topo.limbs[c].b);
            if (!ka || !kb) continue;
            const Vec2f a = to_grid(ka->position_px, grid.scale_factor);
            const Vec2f b = to_grid(kb->position_px, grid.scale_factor);
            const Vec2f d = b - a;
            const float len = d.norm();
            const Vec2f unit = len > 0.0f ? d * (1.0f / len) : Vec2f{0.0f, 0.0f};
            rasterize_segment(px, py, count, a, b, hw, unit);
        }
        finalize_average(px, py, count);
    }
    return paf;
}

std::vector<Plane> synth_tafs(const FrameAnnotation& prev, const FrameAnnotation& curr,
                              const Grid& grid, const SynthConfig& cfg) {
    check_grid(prev, grid);
    check_grid(curr, grid);
    std::map<int, const PoseAnnotation*> prev_by_id;
    for (const PoseAnnotation& pose : prev.poses) prev_by_id[pose.person_id] = &pose;

    std::vector<Plane> taf(2 * kJointCount, Plane(grid.width, grid.height));
    Plane count(grid.width, grid.height);
    const float hw = static_cast<float>(cfg.taf_half_width);
    for (int j = 0; j < kJointCount; ++j) {
        std::fill(count.values.begin(), count.values.end(), 0.0f);
        Plane& tx = taf[2 * j];
        Plane& ty = taf[2 * j + 1];
        for (const PoseAnnotation& pose : curr.poses) {
            const auto it = prev_by_id.find(pose.person_id);
            if (it == prev_by_id.end()) continue;
            const auto& kp_t = pose.keypoints[j];
            const auto& kp_prev = it->second->keypoints[j];
            if (!kp_t || !kp_prev) continue;
            const Vec2f at_t = to_grid(kp_t->position_px, grid.scale_factor);
            const Vec2f at_prev = to_grid(kp_prev->position_px, grid.scale_factor);
            const Vec2f d = at_prev - at_t;  // points from time t toward t-1
            const float len = d.norm();
            const Vec2f unit = len > 0.0f ? d * (1.0f / len) : Vec2f{0.0f, 0.0f};
            rasterize_segment(tx, ty, count, at_t, at_prev, hw, unit);
        }
        finalize_average(tx, ty, count);
    }
    return taf;
}

Plane synth_mask(const FrameAnnotation& frame, const Grid& grid, const SynthConfig& cfg) {
    check_grid(frame, grid);
    Plane mask(grid.width, grid.height, 1.0f);
    if (cfg.mask_policy == SynthConfig::MaskPolicy::all_ones) return mask;

    for (const PoseAnnotation& pose : frame.poses) {
        for (int j = 0; j < kJointCount; ++j) {
            const auto& kp = pose.keypoints[j];
            if (!kp || !(kp->occluded || kp->self_occluded)) continue;
            const Vec2f c = to_grid(kp->position_px, grid.scale_factor);
            const double r = 2.0 * peak_sigma(kp->camera_distance, cfg.alpha_sigma);
            const double r_sq = r * r;
            const int y0 = std::max(0, static_cast<int>(std::ceil(c.y - r)));
            const int y1 = std::min(grid.height - 1, static_cast<int>(std::floor(c.y + r)));
            const int x0 = std::max(0, static_cast<int>(std::ceil(c.x - r)));
            const int x1 = std::min(grid.width - 1, static_cast<int>(std::floor(c.x + r)));
            for (int y = y0; y <= y1; ++y) {
                const double dy = static_cast<double>(y) - static_cast<double>(c.y);
                for (int x = x0; x <= x1; ++x) {
                    const double dx = static_cast<double>(x) - static_cast<double>(c.x);
                    if (dx * dx + dy * dy <= r_sq) mask.at(x, y) = 0.0f;
                }
            }
        }
    }
    return mask;
}

FieldStack synth_stack(const FrameAnnotation& frame, const FrameAnnotation* prev, const Grid& grid,
                       const SkeletonTopology& topo, const SynthConfig& cfg) {
    FieldStack stack;
    stack.grid = grid;
    Heatmaps maps = synth_heatmaps(frame, grid, cfg);
    stack.visible = std::move(maps.visible);
    stack.occluded = std::move(maps.occluded);
    stack.paf = synth_pafs(frame, grid, topo, cfg);
    if (prev != nullptr) stack.taf = synth_tafs(*prev, frame, grid, cfg);
    stack.mask = synth_mask(frame, grid, cfg);
    return stack;
}

LossReport masked_sse_loss(const FieldStack& pred, const FieldStack& truth) {
    if (pred.grid != truth.grid) throw std::invalid_argument("masked_sse_loss: grid mismatch");
    if (pred.visible.size() != truth.visible.size() ||
        pred.occluded.size() != truth.occluded.size() || pred.paf.size() != truth.paf.size())
        throw std::invalid_argument("masked_sse_loss: channel count mismatch");
    if (truth.mask.size() == 0) throw std::invalid_argument("masked_sse_loss: truth has no mask");

    LossReport r;
    r.l_heatmap = plane_loss(pred.visible, truth.visible, truth.mask);
    r.l_occluded = plane_loss(pred.occluded, truth.occluded, truth.mask);
    r.l_paf = plane_loss(pred.paf, truth.paf, truth.mask);
    if (pred.has_taf() && truth.has_taf()) {
        if (pred.taf.size() != truth.taf.size())
            throw std::invalid_argument("masked_sse_loss: TAF channel count mismatch");
        r.l_taf = plane_loss(pred.taf, truth.taf, truth.mask);
    }
    r.total = r.l_heatmap + r.l_occluded + r.l_paf + r.l_taf;
    return r;
}

}  // namespace paftrack
