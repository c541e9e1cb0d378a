// SPDX-License-Identifier: Apache-2.0
#include "paftrack/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace paftrack {

namespace {

// Pixel extent of one meter at one meter distance; gives ~250 px tall
// pedestrians at 8 m and ~20 px at 100 m on full-HD frames.
constexpr double kFocalPx = 1143.0;
constexpr double kMidBodyY = 0.89;  // template anchor height, meters

struct TemplateJoint {
    float x, y;     // body-local meters, y up from the ground
    float swing;    // amplitude along the walk direction, meters
};

constexpr TemplateJoint kTemplate[kJointCount] = {
    {0.00f, 1.78f, 0.00f},   // head_top
    {0.00f, 1.52f, 0.00f},   // neck
    {-0.20f, 1.45f, 0.00f},  // r_shoulder
    {-0.24f, 1.18f, -0.11f}, // r_elbow
    {-0.26f, 0.93f, -0.22f}, // r_wrist
    {0.20f, 1.45f, 0.00f},   // l_shoulder
    {0.24f, 1.18f, 0.11f},   // l_elbow
    {0.26f, 0.93f, 0.22f},   // l_wrist
    {-0.11f, 0.95f, 0.00f},  // r_hip
    {-0.12f, 0.50f, 0.14f},  // r_knee
    {-0.13f, 0.07f, 0.28f},  // r_ankle
    {0.11f, 0.95f, 0.00f},   // l_hip
    {0.12f, 0.50f, -0.14f},  // l_knee
    {0.13f, 0.07f, -0.28f},  // l_ankle
};

// mt19937_64 draws mapped to doubles; the engine sequence is pinned by the
// standard, so output is platform-independent.
class Rng {
 public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive
        const int span = hi - lo + 1;
        return lo + std::min(span - 1, static_cast<int>(uniform() * span));
    }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
            std::swap(v[i], v[uniform_int(0, i)]);
    }

 private:
    std::mt19937_64 eng_;
};

// Triangle fold of `u` into [-half_range, half_range]; sign reports the
// current direction of travel.
double fold(double u, double half_range, double* sign) {
    if (half_range < 1.0) {
        *sign = 1.0;
        return 0.0;
    }
    const double period = 4.0 * half_range;
    double w = std::fmod(u + half_range, period);
    if (w < 0) w += period;
    if (w < 2.0 * half_range) {
        *sign = 1.0;
        return w - half_range;
    }
    *sign = -1.0;
    return 3.0 * half_range - w;
}

struct PersonSpec {
    double distance = 10.0;
    Vec2f base;            // anchor at t = 0 (crossing) or lane center (lane walkers)
    double vx = 0.0;       // px/frame
    double half_range = 0; // fold range for lane walkers; 0 disables folding
    double start_offset = 0;
    double phase0 = 0;
    double gait_freq = 0.5;  // rad/frame
    bool crossing = false;
};

struct OccluderSpec {
    Boxf rect;
    int first_frame = 0;
    int last_frame = 0;  // inclusive
};

Vec2f anchor_at(const PersonSpec& p, int t, double* walk_sign) {
    if (p.crossing) {
        *walk_sign = p.vx >= 0 ? 1.0 : -1.0;
        return {p.base.x + static_cast<float>(p.vx * t), p.base.y};
    }
    double sign = 1.0;
    const double off = fold(p.start_offset + p.vx * t, p.half_range, &sign);
    *walk_sign = p.vx >= 0 ? sign : -sign;
    return {p.base.x + static_cast<float>(off), p.base.y};
}

}  // namespace

std::array<Vec2f, kJointCount> walking_pose(Vec2f anchor_px, double distance_m, double phase,
                                            double walk_sign) {
    const double s = kFocalPx / distance_m;
    const double swing = std::sin(phase);
    std::array<Vec2f, kJointCount> out;
    for (int j = 0; j < kJointCount; ++j) {
        const TemplateJoint& tj = kTemplate[j];
        const double dx = (tj.x + walk_sign * tj.swing * swing) * s;
        const double dy = (kMidBodyY - tj.y) * s;
        out[j] = {anchor_px.x + static_cast<float>(dx), anchor_px.y + static_cast<float>(dy)};
    }
    return out;
}

SequenceAnnotation generate(const SceneConfig& cfg) {
    if (cfg.num_people_min < 0 || cfg.num_people_min > cfg.num_people_max)
        throw std::invalid_argument("simgen: empty num_people range");
    if (!(cfg.distance_min > 0) || cfg.distance_min > cfg.distance_max)
        throw std::invalid_argument("simgen: empty distance range");
    if (cfg.speed_min < 0 || cfg.speed_min > cfg.speed_max)
        throw std::invalid_argument("simgen: empty speed range");
    if (cfg.duration < 1 || cfg.image_width <= 0 || cfg.image_height <= 0 ||
        cfg.crossing_pairs < 0 || cfg.occluder_events < 0)
        throw std::invalid_argument("simgen: invalid scene configuration");

    Rng rng(cfg.seed);
    const double w = cfg.image_width;
    const double h = cfg.image_height;

    std::vector<PersonSpec> people;

    // Lane walkers on a shuffled 6x4 grid of cells, bouncing near the cell
    // center so separated scenes stay separated for the whole sequence.
    const int n_lane = rng.uniform_int(cfg.num_people_min, cfg.num_people_max);
    std::vector<int> cells(24);
    std::iota(cells.begin(), cells.end(), 0);
    rng.shuffle(cells);
    for (int i = 0; i < n_lane; ++i) {
        const int cell = cells[i % 24];
        const int col = cell % 6;
        const int row = cell / 6;
        PersonSpec p;
        p.distance = rng.uniform(cfg.distance_min, cfg.distance_max);
        p.base = {static_cast<float>(w * (0.10 + 0.16 * col) + rng.uniform(-0.01, 0.01) * w),
                  static_cast<float>(h * (0.20 + 0.20 * row) + rng.uniform(-0.02, 0.02) * h)};
        p.vx = rng.uniform(cfg.speed_min, cfg.speed_max) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        p.half_range = std::min(0.03 * w, 30.0);
        p.start_offset = rng.uniform(-p.half_range, p.half_range);
        p.phase0 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        p.gait_freq = rng.uniform(0.35, 0.8);
        people.push_back(p);
    }

    // Crossing pairs: opposite directions in a shared lane, different
    // distances, meeting near the image center mid-sequence.
    for (int pair = 0; pair < cfg.crossing_pairs; ++pair) {
        const double lane_y = h * rng.uniform(0.45, 0.60);
        const double mid = cfg.duration / 2.0;
        PersonSpec a;
        a.crossing = true;
        a.distance = rng.uniform(8.0, 11.0);
        a.vx = rng.uniform(5.0, 8.0);
        a.base = {static_cast<float>(w * 0.5 - a.vx * mid + rng.uniform(-20.0, 20.0)),
                  static_cast<float>(lane_y)};
        a.phase0 = rng.uniform(0.0, 6.28);
        a.gait_freq = rng.uniform(0.35, 0.8);
        PersonSpec b = a;
        b.distance = a.distance + rng.uniform(1.5, 3.0);
        b.vx = -rng.uniform(5.0, 8.0);
        b.base = {static_cast<float>(w * 0.5 - b.vx * mid + rng.uniform(-20.0, 20.0)),
                  static_cast<float>(lane_y + rng.uniform(24.0, 56.0))};
        b.phase0 = rng.uniform(0.0, 6.28);
        people.push_back(a);
        people.push_back(b);
    }

    std::vector<OccluderSpec> occluders;
    const int n_occluders = static_cast<int>(std::floor(cfg.occluder_events)) +
                            (rng.uniform() < cfg.occluder_events - std::floor(cfg.occluder_events)
                                 ? 1
                                 : 0);
    for (int i = 0; i < n_occluders; ++i) {
        const double ow = w * rng.uniform(0.08, 0.25);
        const double oh = h * rng.uniform(0.15, 0.40);
        const double ox = rng.uniform(0.0, w - ow);
        const double oy = rng.uniform(0.0, h - oh);
        OccluderSpec occ;
        occ.rect = {static_cast<float>(ox), static_cast<float>(oy),
                    static_cast<float>(ox + ow), static_cast<float>(oy + oh)};
        occ.first_frame = rng.uniform_int(0, std::max(0, cfg.duration - 2));
        occ.last_frame =
            std::min(cfg.duration - 1, occ.first_frame + rng.uniform_int(cfg.duration / 3 + 1,
                                                                         cfg.duration));
        occluders.push_back(occ);
    }

    SequenceAnnotation seq;
    seq.fps = cfg.fps;
    seq.clip_stride = cfg.clip_stride;
    seq.clip_length = cfg.clip_length;

    for (int t = 0; t < cfg.duration; ++t) {
        FrameAnnotation frame;
        frame.frame_index = t;
        frame.image_width = cfg.image_width;
        frame.image_height = cfg.image_height;

        struct Placed {
            std::array<Vec2f, kJointCount> joints;
            std::array<bool, kJointCount> inside;
            Boxf body;
            Boxf torso;
            bool any = false;
        };
        std::vector<Placed> placed(people.size());
        for (std::size_t i = 0; i < people.size(); ++i) {
            const PersonSpec& p = people[i];
            double walk_sign = 1.0;
            const Vec2f anchor = anchor_at(p, t, &walk_sign);
            placed[i].joints =
                walking_pose(anchor, p.distance, p.phase0 + p.gait_freq * t, walk_sign);
            bool first = true;
            for (int j = 0; j < kJointCount; ++j) {
                const Vec2f q = placed[i].joints[j];
                const bool in = q.x >= 0 && q.x < frame.image_width && q.y >= 0 &&
                                q.y < frame.image_height;
                placed[i].inside[j] = in;
                placed[i].any |= in;
                if (first) {
                    placed[i].body = {q.x, q.y, q.x, q.y};
                    first = false;
                } else {
                    placed[i].body.include(q);
                }
            }
            const Vec2f rs = placed[i].joints[joint_index(JointKind::r_shoulder)];
            const Vec2f lh = placed[i].joints[joint_index(JointKind::l_hip)];
            const Vec2f ls = placed[i].joints[joint_index(JointKind::l_shoulder)];
            const Vec2f rh = placed[i].joints[joint_index(JointKind::r_hip)];
            placed[i].torso = {std::min({rs.x, ls.x, rh.x, lh.x}), std::min({rs.y, ls.y}),
                               std::max({rs.x, ls.x, rh.x, lh.x}), std::max({rh.y, lh.y})};
        }

        for (std::size_t i = 0; i < people.size(); ++i) {
            if (!placed[i].any) continue;
            PoseAnnotation pose;
            pose.person_id = static_cast<int>(i);
            for (int j = 0; j < kJointCount; ++j) {
                if (!placed[i].inside[j]) continue;
                const Vec2f q = placed[i].joints[j];
                Keypoint kp;
                kp.position_px = q;
                kp.camera_distance = static_cast<float>(people[i].distance);

                bool occluded = false;
                for (const OccluderSpec& occ : occluders)
                    if (t >= occ.first_frame && t <= occ.last_frame && occ.rect.contains(q)) {
                        occluded = true;
                        break;
                    }
                if (!occluded) {
                    for (std::size_t other = 0; other < people.size(); ++other) {
                        if (other == i || !placed[other].any) continue;
                        if (people[other].distance + 0.25 < people[i].distance &&
                            placed[other].body.contains(q)) {
                            occluded = true;
                            break;
                        }
                    }
                }
                kp.occluded = occluded;
                if (!occluded) {
                    const JointKind kind = static_cast<JointKind>(j);
                    const bool arm = kind == JointKind::r_elbow || kind == JointKind::r_wrist ||
                                     kind == JointKind::l_elbow || kind == JointKind::l_wrist;
                    if (arm && q.x >= placed[i].torso.x0 && q.x <= placed[i].torso.x1)
                        kp.self_occluded = true;
                }
                pose.keypoints[j] = kp;
            }
            if (pose.present_count() > 0) frame.poses.push_back(std::move(pose));
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

}  // namespace paftrack
