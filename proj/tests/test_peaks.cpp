// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "paftrack/field_synth.hpp"
#include "paftrack/peaks.hpp"

using namespace paftrack;

namespace {

FieldStack stack_with_visible(Plane plane, int kind = 0) {
    FieldStack stack;
    stack.grid = Grid{plane.width, plane.height, 8};
    stack.visible.assign(kJointCount, Plane(plane.width, plane.height));
    stack.occluded.assign(kJointCount, Plane(plane.width, plane.height));
    stack.visible[kind] = std::move(plane);
    stack.mask = Plane(stack.grid.width, stack.grid.height, 1.0f);
    return stack;
}

void splat(Plane& plane, double cx, double cy, double sigma) {
    for (int y = 0; y < plane.height; ++y)
        for (int x = 0; x < plane.width; ++x) {
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            plane.at(x, y) =
                std::max(plane.at(x, y), static_cast<float>(std::exp(-d2 / (sigma * sigma))));
        }
}

// Brute-force peak oracle: strictly-greater-with-row-major-tie-break over the
// same window, no refinement.
std::vector<std::pair<int, int>> peak_oracle(const Plane& plane, double threshold, int window) {
    std::vector<std::pair<int, int>> out;
    const int half = window / 2;
    for (int y = 0; y < plane.height; ++y)
        for (int x = 0; x < plane.width; ++x) {
            const float v = plane.at(x, y);
            if (v <= threshold) continue;
            bool peak = true;
            for (int ny = y - half; ny <= y + half && peak; ++ny)
                for (int nx = x - half; nx <= x + half; ++nx) {
                    if (nx < 0 || ny < 0 || nx >= plane.width || ny >= plane.height) continue;
                    if (nx == x && ny == y) continue;
                    const float nv = plane.at(nx, ny);
                    if (nv > v || (nv == v && (ny < y || (ny == y && nx < x)))) {
                        peak = false;
                        break;
                    }
                }
            if (peak) out.emplace_back(x, y);
        }
    return out;
}

}  // namespace

TEST_CASE("a single on-grid gaussian yields one candidate at the peak") {
    Plane plane(40, 30);
    splat(plane, 20, 15, 1.5);
    const auto set = extract_candidates(stack_with_visible(std::move(plane)), {});
    REQUIRE(set.count(JointKind::head_top) == 1);
    const Candidate& c = set.of(JointKind::head_top)[0];
    CHECK(c.score == 1.0f);
    CHECK(c.position.x == doctest::Approx(20.0f).epsilon(1e-5));
    CHECK(c.position.y == doctest::Approx(15.0f).epsilon(1e-5));
    CHECK_FALSE(c.from_occluded_map);
}

TEST_CASE("a uniform zero heatmap yields no candidates") {
    const auto set = extract_candidates(stack_with_visible(Plane(40, 30)), {});
    CHECK(set.total() == 0);
}

TEST_CASE("two gaussians ten pixels apart are both found") {
    Plane plane(40, 30);
    splat(plane, 10, 15, 1.0);
    splat(plane, 20, 15, 1.0);
    const auto oracle = peak_oracle(plane, 0.1, 3);
    REQUIRE(oracle.size() == 2);
    const auto set = extract_candidates(stack_with_visible(std::move(plane)), {});
    REQUIRE(set.count(JointKind::head_top) == 2);
    const auto& list = set.of(JointKind::head_top);
    CHECK(list[0].position.x == doctest::Approx(10.0f).epsilon(1e-4));
    CHECK(list[1].position.x == doctest::Approx(20.0f).epsilon(1e-4));
}

TEST_CASE("sub-pixel refinement lands near the true center") {
    Plane plane(40, 30);
    splat(plane, 17.3, 11.6, 1.5);
    const auto set = extract_candidates(stack_with_visible(std::move(plane)), {});
    REQUIRE(set.count(JointKind::head_top) == 1);
    const Candidate& c = set.of(JointKind::head_top)[0];
    CHECK(std::fabs(c.position.x - 17.3f) < 0.2f);
    CHECK(std::fabs(c.position.y - 11.6f) < 0.2f);
}

TEST_CASE("equal-valued plateaus keep only the first pixel in row-major order") {
    Plane plane(10, 10);
    plane.at(4, 5) = 0.9f;
    plane.at(5, 5) = 0.9f;
    const auto set = extract_candidates(stack_with_visible(std::move(plane)), {});
    REQUIRE(set.count(JointKind::head_top) == 1);
    // The quadratic fit pulls the refined position toward the equal neighbor.
    CHECK(set.of(JointKind::head_top)[0].position.x == doctest::Approx(4.5f));
}

TEST_CASE("raising the threshold never increases the candidate count") {
    std::mt19937 rng(31);
    Plane plane(50, 40);
    std::uniform_real_distribution<double> pos_x(2, 47), pos_y(2, 37), sig(0.7, 2.0);
    for (int i = 0; i < 12; ++i) splat(plane, pos_x(rng), pos_y(rng), sig(rng));

    int previous = -1;
    for (double threshold : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        AssocConfig cfg;
        cfg.nms_threshold = threshold;
        Plane copy = plane;
        const auto set = extract_candidates(stack_with_visible(std::move(copy)), cfg);
        if (previous >= 0) CHECK(set.total() <= previous);
        previous = set.total();
    }
}

TEST_CASE("occluded candidates merge under visible suppression") {
    Plane visible(40, 30), occluded(40, 30);
    splat(visible, 20, 15, 1.2);
    splat(occluded, 20.6, 15.0, 1.2);  // within one grid pixel of the visible peak
    splat(occluded, 30, 10, 1.2);      // far away, survives
    FieldStack stack = stack_with_visible(std::move(visible));
    stack.occluded[0] = std::move(occluded);

    AssocConfig with_occ;
    const auto merged = extract_candidates(stack, with_occ);
    REQUIRE(merged.count(JointKind::head_top) == 2);
    CHECK_FALSE(merged.of(JointKind::head_top)[0].from_occluded_map);
    CHECK(merged.of(JointKind::head_top)[1].from_occluded_map);
    CHECK(merged.of(JointKind::head_top)[1].position.x == doctest::Approx(30.0f).epsilon(1e-4));

    AssocConfig without_occ;
    without_occ.use_occluded_candidates = false;
    const auto visible_only = extract_candidates(stack, without_occ);
    CHECK(visible_only.count(JointKind::head_top) == 1);
}

TEST_CASE("recovery: separated synthesized keypoints come back within half a grid pixel") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<float> dist(8.0f, 24.0f);
    for (int trial = 0; trial < 10; ++trial) {
        FrameAnnotation frame;
        frame.image_width = 640;
        frame.image_height = 480;
        // Three people on a coarse lattice: same-kind separations > 4 sigma_max.
        for (int person = 0; person < 3; ++person) {
            PoseAnnotation pose;
            pose.person_id = person;
            for (int j = 0; j < kJointCount; ++j) {
                Keypoint kp;
                kp.position_px = {60.0f + 180.0f * person +
                                      8.0f * static_cast<float>(j % 4) +
                                      std::uniform_real_distribution<float>(0, 6)(rng),
                                  60.0f + 90.0f * (j / 4) +
                                      std::uniform_real_distribution<float>(0, 6)(rng)};
                kp.camera_distance = dist(rng);
                pose.keypoints[j] = kp;
            }
            frame.poses.push_back(pose);
        }
        const Grid grid = Grid::for_image(frame.image_width, frame.image_height);
        const FieldStack stack = synth_stack(frame, nullptr, grid, default_topology(), {});
        const auto set = extract_candidates(stack, {});
        for (int j = 0; j < kJointCount; ++j) {
            REQUIRE(set.count(static_cast<JointKind>(j)) == 3);
            for (const PoseAnnotation& pose : frame.poses) {
                const Vec2f expected = {pose.keypoints[j]->position_px.x / 8.0f,
                                        pose.keypoints[j]->position_px.y / 8.0f};
                float best = 1e9f;
                for (const Candidate& c : set.of(static_cast<JointKind>(j)))
                    best = std::min(best, (c.position - expected).norm());
                CHECK(best <= 0.5f);
            }
        }
    }
}

TEST_CASE("even window sizes are rejected") {
    AssocConfig cfg;
    cfg.nms_window = 4;
    CHECK_THROWS_AS(extract_candidates(stack_with_visible(Plane(10, 10)), cfg),
                    std::invalid_argument);
}
