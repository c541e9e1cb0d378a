// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <set>

#include "paftrack/topology.hpp"
#include "paftrack/validate.hpp"

using namespace paftrack;

namespace {

SequenceAnnotation two_frame_sequence() {
    SequenceAnnotation seq;
    for (int f = 0; f < 2; ++f) {
        FrameAnnotation frame;
        frame.frame_index = f;
        frame.image_width = 640;
        frame.image_height = 480;
        PoseAnnotation pose;
        pose.person_id = 0;
        Keypoint kp;
        kp.position_px = {100.0f + f, 200.0f};
        kp.camera_distance = 10.0f;
        pose.keypoints[joint_index(JointKind::head_top)] = kp;
        kp.position_px = {100.0f + f, 220.0f};
        pose.keypoints[joint_index(JointKind::neck)] = kp;
        frame.poses.push_back(pose);
        seq.frames.push_back(frame);
    }
    return seq;
}

}  // namespace

TEST_CASE("joint names are a bijection onto [0, 13]") {
    std::set<std::string_view> names;
    for (int j = 0; j < kJointCount; ++j) {
        const JointKind kind = static_cast<JointKind>(j);
        names.insert(joint_name(kind));
        const auto back = joint_from_name(joint_name(kind));
        REQUIRE(back.has_value());
        CHECK(*back == kind);
    }
    CHECK(names.size() == kJointCount);
    CHECK_FALSE(joint_from_name("noggin").has_value());
}

TEST_CASE("default topology is a 13-limb spanning tree with a head limb") {
    const SkeletonTopology& topo = default_topology();
    CHECK(topo.limb_count() == kJointCount - 1);
    CHECK(topology_violations(topo).empty());

    bool has_head = false;
    for (const Limb& limb : topo.limbs)
        if ((limb.a == JointKind::head_top && limb.b == JointKind::neck) ||
            (limb.b == JointKind::head_top && limb.a == JointKind::neck))
            has_head = true;
    CHECK(has_head);

    // Independent connectivity oracle: BFS over the limb graph.
    std::array<std::vector<int>, kJointCount> adjacent;
    for (const Limb& limb : topo.limbs) {
        adjacent[joint_index(limb.a)].push_back(joint_index(limb.b));
        adjacent[joint_index(limb.b)].push_back(joint_index(limb.a));
    }
    std::set<int> seen{0};
    std::vector<int> queue{0};
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        for (int next : adjacent[v])
            if (seen.insert(next).second) queue.push_back(next);
    }
    CHECK(seen.size() == kJointCount);
}

TEST_CASE("topology violations are detected") {
    SkeletonTopology broken = default_topology();
    broken.limbs.pop_back();
    CHECK_FALSE(topology_violations(broken).empty());

    SkeletonTopology cyclic = default_topology();
    cyclic.limbs.back() = {JointKind::head_top, JointKind::neck};
    CHECK_FALSE(topology_violations(cyclic).empty());
}

TEST_CASE("grid padding covers the image with a multiple of the scale factor") {
    const Grid grid = Grid::for_image(1920, 1080);
    CHECK(grid.width == 240);
    CHECK(grid.height == 135);
    CHECK(grid.padded_image_width() == 1920);
    CHECK(grid.padded_image_height() == 1080);

    const Grid odd = Grid::for_image(1000, 700);
    CHECK(odd.width == 125);
    CHECK(odd.height == 88);
    CHECK(odd.padded_image_width() == 1000);
    CHECK(odd.padded_image_height() == 704);

    std::mt19937 rng(7);
    for (int i = 0; i < 200; ++i) {
        const int w = 1 + static_cast<int>(rng() % 4000);
        const int h = 1 + static_cast<int>(rng() % 4000);
        const Grid g = Grid::for_image(w, h);
        CHECK(g.padded_image_width() >= w);
        CHECK(g.padded_image_width() - w < g.scale_factor);
        CHECK(g.padded_image_height() >= h);
        CHECK(g.padded_image_height() - h < g.scale_factor);
    }
}

TEST_CASE("validate_sequence accepts a well-formed sequence") {
    CHECK(validate_sequence(two_frame_sequence()).empty());
}

TEST_CASE("validate_sequence reports duplicate person ids with the frame") {
    SequenceAnnotation seq = two_frame_sequence();
    seq.frames[1].poses.push_back(seq.frames[1].poses[0]);
    const auto violations = validate_sequence(seq);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].frame_index == 1);
    CHECK(violations[0].message.find("duplicate person_id 0") != std::string::npos);
}

TEST_CASE("validate_sequence rejects keypoints on the exclusive image border") {
    SequenceAnnotation seq = two_frame_sequence();
    seq.frames[0].poses[0].keypoints[0]->position_px.x = 640.0f;  // x == w
    const auto violations = validate_sequence(seq);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].message.find("out of bounds") != std::string::npos);
}

TEST_CASE("validate_sequence catches flag, distance and ordering violations") {
    SequenceAnnotation seq = two_frame_sequence();
    seq.frames[0].poses[0].keypoints[0]->occluded = true;
    seq.frames[0].poses[0].keypoints[0]->self_occluded = true;
    seq.frames[1].poses[0].keypoints[1]->camera_distance = 0.0f;
    seq.frames[1].frame_index = 0;  // not strictly increasing
    seq.clip_stride = 0;
    seq.clip_length = 1;
    const auto violations = validate_sequence(seq);
    CHECK(violations.size() == 5);

    // Idempotent and side-effect free.
    const auto again = validate_sequence(seq);
    CHECK(again.size() == violations.size());
}
