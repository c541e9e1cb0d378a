// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "paftrack/geometry.hpp"

namespace paftrack {

// The 14 annotated body joints, MPII-style ordering.
enum class JointKind : int {
    head_top = 0,
    neck,
    r_shoulder,
    r_elbow,
    r_wrist,
    l_shoulder,
    l_elbow,
    l_wrist,
    r_hip,
    r_knee,
    r_ankle,
    l_hip,
    l_knee,
    l_ankle,
};

inline constexpr int kJointCount = 14;

constexpr int joint_index(JointKind k) { return static_cast<int>(k); }

std::string_view joint_name(JointKind kind);
std::optional<JointKind> joint_from_name(std::string_view name);

struct Keypoint {
    Vec2f position_px;           // input-image pixels
    float camera_distance = 1;   // meters, finite and > 0
    bool occluded = false;       // hidden by objects or other people
    bool self_occluded = false;  // hidden by the owner's own body
};

struct PoseAnnotation {
    int person_id = 0;  // stable across a sequence, unique within a frame
    std::array<std::optional<Keypoint>, kJointCount> keypoints;
    std::optional<double> score;  // prediction confidence; absent for ground truth

    const std::optional<Keypoint>& keypoint(JointKind k) const { return keypoints[joint_index(k)]; }
    std::optional<Keypoint>& keypoint(JointKind k) { return keypoints[joint_index(k)]; }
    int present_count() const {
        int n = 0;
        for (const auto& kp : keypoints)
            if (kp) ++n;
        return n;
    }
};

struct FrameAnnotation {
    int frame_index = 0;
    int image_width = 0;
    int image_height = 0;
    std::vector<PoseAnnotation> poses;
};

struct SequenceAnnotation {
    std::vector<FrameAnnotation> frames;
    double fps = 30.0;
    int clip_stride = 1;  // frame gap between temporally linked frames
    int clip_length = 8;  // subsampled frames per clip
};

// Field grids are an integer factor smaller than the input image; inputs are
// right/bottom zero-padded to a multiple of the factor at ingestion.
struct Grid {
    int width = 0;   // w'
    int height = 0;  // h'
    int scale_factor = 8;

    static Grid for_image(int image_width, int image_height, int scale_factor = 8);
    int padded_image_width() const { return width * scale_factor; }
    int padded_image_height() const { return height * scale_factor; }
    bool operator==(const Grid&) const = default;
};

struct Plane {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    Plane() = default;
    Plane(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    float* row(int y) { return values.data() + static_cast<std::size_t>(y) * width; }
    const float* row(int y) const { return values.data() + static_cast<std::size_t>(y) * width; }
    std::size_t size() const { return values.size(); }
};

// Dense per-frame ground truth / prediction grids. PAF and TAF channels are
// stored as x/y plane pairs: paf[2c], paf[2c+1] for limb c, taf[2j], taf[2j+1]
// for joint kind j. TAF planes are empty for single-frame stacks.
struct FieldStack {
    Grid grid;
    std::vector<Plane> visible;   // J heatmap channels
    std::vector<Plane> occluded;  // J heatmap channels
    std::vector<Plane> paf;       // 2C planes
    std::vector<Plane> taf;       // 2J planes, or empty
    Plane mask;                   // {0,1} loss mask

    bool has_taf() const { return !taf.empty(); }
    int limb_count() const { return static_cast<int>(paf.size()) / 2; }
};

struct SynthConfig {
    enum class MaskPolicy { all_ones, exclude_occluded_disks };

    double alpha_sigma = 20.0;    // meters; controls distance-conditioned peak spread
    double paf_half_width = 1.0;  // grid pixels
    double taf_half_width = 1.0;  // grid pixels
    MaskPolicy mask_policy = MaskPolicy::all_ones;
};

struct AssocConfig {
    double temporal_weight = 1.0;  // weight of the warped previous-frame limb term
    int integral_samples = 10;
    double nms_threshold = 0.1;
    int nms_window = 3;  // odd
    double min_limb_score = 0.05;
    double search_radius_multiplier = 2.0;  // times previous-skeleton diagonal
    bool use_occluded_candidates = true;
};

}  // namespace paftrack
