// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "paftrack/annotation_io.hpp"
#include "paftrack/metrics.hpp"
#include "paftrack/simgen.hpp"
#include "paftrack/validate.hpp"

using namespace paftrack;

TEST_CASE("generation is deterministic under the seed") {
    SceneConfig cfg;
    cfg.seed = 7;
    cfg.num_people_min = 3;
    cfg.num_people_max = 9;
    cfg.distance_min = 6.0;
    cfg.distance_max = 30.0;
    cfg.occluder_events = 1.5;
    cfg.duration = 12;
    const AnnotationDocument a{generate(cfg), default_topology()};
    const AnnotationDocument b{generate(cfg), default_topology()};
    CHECK(serialize_annotation(a) == serialize_annotation(b));

    cfg.seed = 8;
    const AnnotationDocument c{generate(cfg), default_topology()};
    CHECK(serialize_annotation(a) != serialize_annotation(c));
}

TEST_CASE("zero people yields empty but valid frames") {
    SceneConfig cfg;
    cfg.num_people_min = cfg.num_people_max = 0;
    cfg.duration = 5;
    const SequenceAnnotation seq = generate(cfg);
    CHECK(seq.frames.size() == 5);
    for (const FrameAnnotation& frame : seq.frames) CHECK(frame.poses.empty());
    CHECK(validate_sequence(seq).empty());
}

TEST_CASE("generated scenes always satisfy the annotation invariants") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 42ull, 1234ull}) {
        SceneConfig cfg;
        cfg.seed = seed;
        cfg.num_people_min = 1;
        cfg.num_people_max = 20;
        cfg.occluder_events = 1.0;
        cfg.crossing_pairs = 1;
        cfg.duration = 15;
        const SequenceAnnotation seq = generate(cfg);
        CHECK(validate_sequence(seq).empty());
        CHECK(seq.frames.size() == 15);
    }
}

TEST_CASE("skeleton extent halves when the distance doubles") {
    const auto near = walking_pose({500, 400}, 7.0, 1.1, 1.0);
    const auto far = walking_pose({500, 400}, 14.0, 1.1, 1.0);
    auto extent = [](const std::array<Vec2f, kJointCount>& joints) {
        Boxf box{joints[0].x, joints[0].y, joints[0].x, joints[0].y};
        for (const Vec2f& j : joints) box.include(j);
        return std::pair{box.width(), box.height()};
    };
    const auto [near_w, near_h] = extent(near);
    const auto [far_w, far_h] = extent(far);
    CHECK(far_w == doctest::Approx(near_w / 2).epsilon(1e-4));
    CHECK(far_h == doctest::Approx(near_h / 2).epsilon(1e-4));
}

TEST_CASE("a crossing pair overlaps in at least one frame") {
    for (std::uint64_t seed : {10ull, 11ull, 12ull, 13ull}) {
        SceneConfig cfg;
        cfg.seed = seed;
        cfg.num_people_min = cfg.num_people_max = 0;
        cfg.crossing_pairs = 1;
        cfg.duration = 30;
        const SequenceAnnotation seq = generate(cfg);
        bool overlapped = false;
        for (const FrameAnnotation& frame : seq.frames) {
            if (frame.poses.size() != 2) continue;
            const auto a = gt_box(frame.poses[0]);
            const auto b = gt_box(frame.poses[1]);
            if (a && b && iou(*a, *b) > 0.0f) overlapped = true;
        }
        CHECK(overlapped);
    }
}

TEST_CASE("occluders flag joints as occluded") {
    SceneConfig cfg;
    cfg.seed = 21;
    cfg.num_people_min = cfg.num_people_max = 8;
    cfg.distance_min = 6.0;
    cfg.distance_max = 20.0;
    cfg.occluder_events = 4.0;
    cfg.duration = 10;
    const SequenceAnnotation seq = generate(cfg);
    int occluded = 0;
    for (const FrameAnnotation& frame : seq.frames)
        for (const PoseAnnotation& pose : frame.poses)
            for (const auto& kp : pose.keypoints)
                if (kp && kp->occluded) ++occluded;
    CHECK(occluded > 0);
}

TEST_CASE("person ids are stable across frames") {
    SceneConfig cfg;
    cfg.seed = 33;
    cfg.num_people_min = cfg.num_people_max = 4;
    cfg.distance_min = 8.0;
    cfg.distance_max = 16.0;
    cfg.duration = 8;
    const SequenceAnnotation seq = generate(cfg);
    for (const FrameAnnotation& frame : seq.frames) {
        CHECK(frame.poses.size() == 4);
        for (std::size_t p = 0; p < frame.poses.size(); ++p)
            CHECK(frame.poses[p].person_id == static_cast<int>(p));
    }
}

TEST_CASE("invalid scene configurations are rejected") {
    SceneConfig bad;
    bad.num_people_min = 5;
    bad.num_people_max = 2;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);

    SceneConfig bad_distance;
    bad_distance.distance_min = 0.0;
    CHECK_THROWS_AS(generate(bad_distance), std::invalid_argument);
}
