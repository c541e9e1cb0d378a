// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "paftrack/field_synth.hpp"

using namespace paftrack;

namespace {

FrameAnnotation empty_frame(int w = 320, int h = 240) {
    FrameAnnotation frame;
    frame.image_width = w;
    frame.image_height = h;
    return frame;
}

Keypoint keypoint(float x, float y, float d, bool occluded = false, bool self_occluded = false) {
    Keypoint kp;
    kp.position_px = {x, y};
    kp.camera_distance = d;
    kp.occluded = occluded;
    kp.self_occluded = self_occluded;
    return kp;
}

// Independent oracle: untruncated max-of-Gaussians in double precision.
double heatmap_oracle(const FrameAnnotation& frame, const Grid& grid, int kind, int x, int y,
                      double alpha, bool occluded_channel) {
    double best = 0.0;
    for (const PoseAnnotation& pose : frame.poses) {
        const auto& kp = pose.keypoints[kind];
        if (!kp) continue;
        if ((kp->occluded || kp->self_occluded) != occluded_channel) continue;
        const double cx = kp->position_px.x / grid.scale_factor;
        const double cy = kp->position_px.y / grid.scale_factor;
        const double sigma = peak_sigma(kp->camera_distance, alpha);
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        best = std::max(best, std::exp(-d2 / (sigma * sigma)));
    }
    return best;
}

}  // namespace

TEST_CASE("sigma analytic values") {
    CHECK(std::fabs(peak_sigma(20.0, 20.0) - 1.0) < 1e-12);
    CHECK(std::fabs(peak_sigma(0.0, 20.0) - std::exp(1.0)) < 1e-12);
}

TEST_CASE("an on-grid visible keypoint peaks at exactly one") {
    FrameAnnotation frame = empty_frame();
    PoseAnnotation pose;
    pose.keypoints[0] = keypoint(80.0f, 64.0f, 13.7f);  // grid (10, 8)
    frame.poses.push_back(pose);
    const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
    const Heatmaps maps = synth_heatmaps(frame, grid, {});
    CHECK(maps.visible[0].at(10, 8) == 1.0f);
    CHECK(maps.occluded[0].at(10, 8) == 0.0f);
}

TEST_CASE("occluded and self-occluded keypoints go to the occluded channel") {
    FrameAnnotation frame = empty_frame();
    PoseAnnotation pose;
    pose.keypoints[2] = keypoint(80.0f, 64.0f, 20.0f, true, false);
    pose.keypoints[3] = keypoint(160.0f, 64.0f, 20.0f, false, true);
    frame.poses.push_back(pose);
    const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
    const Heatmaps maps = synth_heatmaps(frame, grid, {});
    CHECK(maps.occluded[2].at(10, 8) == 1.0f);
    CHECK(maps.visible[2].at(10, 8) == 0.0f);
    CHECK(maps.occluded[3].at(20, 8) == 1.0f);
}

TEST_CASE("overlapping same-kind gaussians take the max, not the sum") {
    FrameAnnotation frame = empty_frame();
    PoseAnnotation a, b;
    a.person_id = 0;
    b.person_id = 1;
    a.keypoints[0] = keypoint(80.0f, 80.0f, 18.0f);   // grid (10, 10)
    b.keypoints[0] = keypoint(96.0f, 80.0f, 16.0f);   // grid (12, 10)
    frame.poses.push_back(a);
    frame.poses.push_back(b);
    const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
    const SynthConfig cfg;
    const Heatmaps maps = synth_heatmaps(frame, grid, cfg);

    CHECK(maps.visible[0].at(10, 10) == 1.0f);
    CHECK(maps.visible[0].at(12, 10) == 1.0f);
    for (int y = 5; y <= 15; ++y)
        for (int x = 5; x <= 17; ++x) {
            const float v = maps.visible[0].at(x, y);
            CHECK(v <= 1.0f);
            const double want = heatmap_oracle(frame, grid, 0, x, y, cfg.alpha_sigma, false);
            // Truncation at 3 sigma keeps the residual under exp(-9).
            CHECK(std::fabs(v - want) <= 2e-4);
        }
}

TEST_CASE("sub-pixel keypoints reach the corner-distance bound at the nearest grid point") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<float> pos(40.0f, 200.0f);
    std::uniform_real_distribution<float> dist(5.0f, 30.0f);
    for (int trial = 0; trial < 50; ++trial) {
        FrameAnnotation frame = empty_frame();
        PoseAnnotation pose;
        const float d = dist(rng);
        pose.keypoints[0] = keypoint(pos(rng), pos(rng), d);
        frame.poses.push_back(pose);
        const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
        const Heatmaps maps = synth_heatmaps(frame, grid, {});
        const double sigma = peak_sigma(d, 20.0);
        const int nx = static_cast<int>(std::lround(pose.keypoints[0]->position_px.x / 8.0f));
        const int ny = static_cast<int>(std::lround(pose.keypoints[0]->position_px.y / 8.0f));
        // Worst case: the center sits at a pixel corner, squared distance 0.5.
        const double bound = std::exp(-0.5 / (sigma * sigma)) * (1.0 - 1e-6);
        CHECK(maps.visible[0].at(nx, ny) >= bound);
    }
}

TEST_CASE("larger camera distance gives a strictly narrower peak") {
    const Grid grid = Grid::for_image(320, 240);
    auto count_above = [&](float d, float threshold) {
        FrameAnnotation frame = empty_frame();
        PoseAnnotation pose;
        pose.keypoints[0] = keypoint(160.0f, 120.0f, d);
        frame.poses.push_back(pose);
        const Heatmaps maps = synth_heatmaps(frame, grid, {});
        int n = 0;
        for (float v : maps.visible[0].values)
            if (v > threshold) ++n;
        return n;
    };
    for (float threshold : {0.1f, 0.5f}) {
        CHECK(count_above(25.0f, threshold) < count_above(10.0f, threshold));
    }
    for (float threshold : {0.3f, 0.9f}) {
        CHECK(count_above(25.0f, threshold) <= count_above(10.0f, threshold));
    }
    CHECK(peak_sigma(25.0, 20.0) < peak_sigma(10.0, 20.0));
}

TEST_CASE("grid mismatch is rejected") {
    FrameAnnotation frame = empty_frame();
    const Grid wrong{10, 10, 8};
    CHECK_THROWS_AS(synth_heatmaps(frame, wrong, {}), std::invalid_argument);
    CHECK_THROWS_AS(synth_pafs(frame, wrong, default_topology(), {}), std::invalid_argument);
    CHECK_THROWS_AS(synth_mask(frame, wrong, {}), std::invalid_argument);
}

TEST_CASE("a single horizontal limb rasterizes the unit vector along +x") {
    FrameAnnotation frame = empty_frame();
    PoseAnnotation pose;
    pose.keypoints[joint_index(JointKind::r_shoulder)] = keypoint(16.0f, 40.0f, 20.0f);
    pose.keypoints[joint_index(JointKind::r_elbow)] = keypoint(64.0f, 40.0f, 20.0f);
    frame.poses.push_back(pose);
    const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
    const auto paf = synth_pafs(frame, grid, default_topology(), {});
    const int limb = 3;  // r_shoulder -> r_elbow in the default tree
    CHECK(paf[2 * limb].at(5, 5) == 1.0f);
    CHECK(paf[2 * limb + 1].at(5, 5) == 0.0f);
    // Far from the segment: zero.
    CHECK(paf[2 * limb].at(5, 9) == 0.0f);
    CHECK(paf[2 * limb].at(20, 5) == 0.0f);
}

TEST_CASE("antiparallel limbs of two people average to the zero vector") {
    FrameAnnotation frame = empty_frame();
    PoseAnnotation a, b;
    a.person_id = 0;
    b.person_id = 1;
    a.keypoints[joint_index(JointKind::r_shoulder)] = keypoint(16.0f, 40.0f, 20.0f);
    a.keypoints[joint_index(JointKind::r_elbow)] = keypoint(64.0f, 40.0f, 20.0f);
    b.keypoints[joint_index(JointKind::r_shoulder)] = keypoint(64.0f, 40.0f, 20.0f);
    b.keypoints[joint_index(JointKind::r_elbow)] = keypoint(16.0f, 40.0f, 20.0f);
    frame.poses.push_back(a);
    frame.poses.push_back(b);
    const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
    const auto paf = synth_pafs(frame, grid, default_topology(), {});
    const int limb = 3;
    CHECK(paf[2 * limb].at(5, 5) == 0.0f);
    CHECK(paf[2 * limb + 1].at(5, 5) == 0.0f);
}

TEST_CASE("PAF and TAF magnitudes never exceed one") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<float> pos(0.0f, 319.0f);
    std::uniform_real_distribution<float> posy(0.0f, 239.0f);
    FrameAnnotation prev = empty_frame(), curr = empty_frame();
    for (int person = 0; person < 6; ++person) {
        PoseAnnotation p0, p1;
        p0.person_id = p1.person_id = person;
        for (int j = 0; j < kJointCount; ++j) {
            p0.keypoints[j] = keypoint(pos(rng), posy(rng), 15.0f);
            p1.keypoints[j] = keypoint(pos(rng), posy(rng), 15.0f);
        }
        prev.poses.push_back(p0);
        curr.poses.push_back(p1);
    }
    const Grid grid = Grid::for_image(320, 240);
    const auto paf = synth_pafs(curr, grid, default_topology(), {});
    const auto taf = synth_tafs(prev, curr, grid, {});
    for (std::size_t c = 0; c + 1 < paf.size(); c += 2)
        for (std::size_t i = 0; i < paf[c].size(); ++i) {
            const float mag = std::hypot(paf[c].values[i], paf[c + 1].values[i]);
            CHECK(mag <= 1.0f + 1e-6f);
        }
    for (std::size_t c = 0; c + 1 < taf.size(); c += 2)
        for (std::size_t i = 0; i < taf[c].size(); ++i) {
            const float mag = std::hypot(taf[c].values[i], taf[c + 1].values[i]);
            CHECK(mag <= 1.0f + 1e-6f);
        }
}

TEST_CASE("TAF points from the current location back toward the previous one") {
    FrameAnnotation prev = empty_frame(), curr = empty_frame();
    PoseAnnotation p0, p1;
    p0.person_id = p1.person_id = 7;
    p0.keypoints[0] = keypoint(80.0f, 80.0f, 20.0f);   // grid (10, 10) at t-1
    p1.keypoints[0] = keypoint(112.0f, 80.0f, 20.0f);  // grid (14, 10) at t
    prev.poses.push_back(p0);
    curr.poses.push_back(p1);
    const Grid grid = Grid::for_image(320, 240);
    const auto taf = synth_tafs(prev, curr, grid, {});
    CHECK(taf[0].at(12, 10) == -1.0f);
    CHECK(taf[1].at(12, 10) == 0.0f);
}

TEST_CASE("a stationary joint leaves a zero TAF") {
    FrameAnnotation prev = empty_frame(), curr = empty_frame();
    PoseAnnotation p;
    p.person_id = 1;
    p.keypoints[0] = keypoint(80.0f, 80.0f, 20.0f);
    prev.poses.push_back(p);
    curr.poses.push_back(p);
    const Grid grid = Grid::for_image(320, 240);
    const auto taf = synth_tafs(prev, curr, grid, {});
    for (const Plane& plane : taf)
        for (float v : plane.values) CHECK(v == 0.0f);
}

TEST_CASE("people present in only one frame contribute no TAF") {
    FrameAnnotation prev = empty_frame(), curr = empty_frame();
    PoseAnnotation p;
    p.person_id = 3;
    p.keypoints[0] = keypoint(80.0f, 80.0f, 20.0f);
    curr.poses.push_back(p);
    const Grid grid = Grid::for_image(320, 240);
    const auto taf = synth_tafs(prev, curr, grid, {});
    for (const Plane& plane : taf)
        for (float v : plane.values) CHECK(v == 0.0f);
}

TEST_CASE("mask policies") {
    FrameAnnotation frame = empty_frame();
    PoseAnnotation pose;
    pose.keypoints[0] = keypoint(160.0f, 120.0f, 12.0f, true);
    pose.keypoints[1] = keypoint(80.0f, 60.0f, 12.0f);
    frame.poses.push_back(pose);
    const Grid grid = Grid::for_image(frame.image_width, frame.image_height);

    SynthConfig all_ones;
    const Plane ones = synth_mask(frame, grid, all_ones);
    for (float v : ones.values) CHECK(v == 1.0f);

    SynthConfig exclude;
    exclude.mask_policy = SynthConfig::MaskPolicy::exclude_occluded_disks;

    FrameAnnotation visible_only = empty_frame();
    PoseAnnotation vis;
    vis.keypoints[1] = keypoint(80.0f, 60.0f, 12.0f);
    visible_only.poses.push_back(vis);
    const Plane still_ones = synth_mask(visible_only, grid, exclude);
    for (float v : still_ones.values) CHECK(v == 1.0f);

    const Plane masked = synth_mask(frame, grid, exclude);
    // Brute-force disk oracle.
    const double sigma = peak_sigma(12.0, exclude.alpha_sigma);
    const double r = 2.0 * sigma;
    int disk = 0;
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            const double dx = x - 20.0;
            const double dy = y - 15.0;
            if (dx * dx + dy * dy <= r * r) ++disk;
        }
    double sum = 0;
    for (float v : masked.values) sum += v;
    CHECK(sum == doctest::Approx(grid.width * grid.height - disk));
}

TEST_CASE("masked SSE loss identities") {
    FrameAnnotation prev = empty_frame(), curr = empty_frame();
    PoseAnnotation p0, p1;
    p0.person_id = p1.person_id = 0;
    for (int j = 0; j < kJointCount; ++j) {
        p0.keypoints[j] = keypoint(80.0f + 6.0f * j, 60.0f + 9.0f * j, 15.0f);
        p1.keypoints[j] = keypoint(84.0f + 6.0f * j, 60.0f + 9.0f * j, 15.0f);
    }
    prev.poses.push_back(p0);
    curr.poses.push_back(p1);
    const Grid grid = Grid::for_image(320, 240);
    const FieldStack truth = synth_stack(curr, &prev, grid, default_topology(), {});

    const LossReport zero = masked_sse_loss(truth, truth);
    CHECK(zero.l_heatmap == 0.0);
    CHECK(zero.l_occluded == 0.0);
    CHECK(zero.l_paf == 0.0);
    CHECK(zero.l_taf == 0.0);
    CHECK(zero.total == 0.0);

    // A single-pixel discrepancy of 0.5 on a visible channel.
    FieldStack pred = truth;
    pred.visible[4].at(3, 3) += 0.5f;
    const LossReport half = masked_sse_loss(pred, truth);
    CHECK(half.l_heatmap == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(half.total == half.l_heatmap + half.l_occluded + half.l_paf + half.l_taf);

    // The same discrepancy under a zeroed mask pixel is invisible.
    FieldStack masked_truth = truth;
    masked_truth.mask.at(3, 3) = 0.0f;
    const LossReport hidden = masked_sse_loss(pred, masked_truth);
    CHECK(hidden.total == 0.0);

    // Positivity: any visible discrepancy on a mask-1 pixel shows up.
    CHECK(half.total > 0.0);

    // TAF term is dropped when either side lacks TAF channels.
    FieldStack no_taf = pred;
    no_taf.taf.clear();
    const LossReport partial = masked_sse_loss(no_taf, truth);
    CHECK(partial.l_taf == 0.0);

    FieldStack wrong = truth;
    wrong.grid.width += 1;
    CHECK_THROWS_AS(masked_sse_loss(wrong, truth), std::invalid_argument);
}

TEST_CASE("synthesis is deterministic bit for bit") {
    FrameAnnotation prev = empty_frame(), curr = empty_frame();
    PoseAnnotation p0, p1;
    p0.person_id = p1.person_id = 0;
    for (int j = 0; j < kJointCount; ++j) {
        p0.keypoints[j] = keypoint(77.7f + 5.1f * j, 59.3f + 8.8f * j, 11.0f + j);
        p1.keypoints[j] = keypoint(81.2f + 5.1f * j, 60.0f + 8.8f * j, 11.0f + j);
    }
    prev.poses.push_back(p0);
    curr.poses.push_back(p1);
    const Grid grid = Grid::for_image(320, 240);
    const FieldStack s1 = synth_stack(curr, &prev, grid, default_topology(), {});
    const FieldStack s2 = synth_stack(curr, &prev, grid, default_topology(), {});
    auto planes_equal = [](const std::vector<Plane>& a, const std::vector<Plane>& b) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::memcmp(a[i].values.data(), b[i].values.data(),
                            a[i].size() * sizeof(float)) != 0)
                return false;
        return true;
    };
    CHECK(planes_equal(s1.visible, s2.visible));
    CHECK(planes_equal(s1.occluded, s2.occluded));
    CHECK(planes_equal(s1.paf, s2.paf));
    CHECK(planes_equal(s1.taf, s2.taf));
}
