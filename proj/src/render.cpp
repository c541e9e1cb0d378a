// SPDX-License-Identifier: Apache-2.0
#include "paftrack/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace paftrack {

namespace {

constexpr Rgb kVisibleJoint{40, 220, 60};
constexpr Rgb kOccludedJoint{230, 50, 40};
constexpr Rgb kSelfOccludedJoint{240, 200, 40};

// Small palette cycled by person id for limb colors.
constexpr Rgb kLimbPalette[] = {
    {80, 160, 255}, {255, 140, 60}, {180, 90, 255}, {90, 220, 200},
    {250, 100, 170}, {160, 210, 80}, {120, 120, 255}, {220, 180, 120},
};

}  // namespace

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = fill.r;
        rgb[i + 1] = fill.g;
        rgb[i + 2] = fill.b;
    }
}

void Image::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
}

Image load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::schema, path, "cannot open for reading");
    std::string magic;
    in >> magic;
    if (magic != "P6") throw IoError(IoError::Kind::bad_magic, path, "expected a binary P6 PPM");
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    if (!in || w <= 0 || h <= 0) throw IoError(IoError::Kind::schema, path, "bad PPM dimensions");
    if (maxval != 255) throw IoError(IoError::Kind::schema, path, "only maxval 255 supported");
    in.get();  // single whitespace after the header
    Image img(w, h);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.rgb.size())
        throw IoError(IoError::Kind::truncated, path,
                      "expected " + std::to_string(img.rgb.size()) + " pixel bytes, got " +
                          std::to_string(in.gcount()));
    return img;
}

void save_ppm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::schema, path, "cannot open for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) throw IoError(IoError::Kind::schema, path, "write failed");
}

void draw_line(Image& img, Vec2f a, Vec2f b, Rgb color) {
    const float len = (b - a).norm();
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int i = 0; i <= steps; ++i) {
        const float u = static_cast<float>(i) / steps;
        const Vec2f p = a + (b - a) * u;
        img.set(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)), color);
    }
}

void draw_disc(Image& img, Vec2f center, float radius, Rgb color) {
    const int r = static_cast<int>(std::ceil(radius));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (static_cast<float>(dx * dx + dy * dy) <= radius * radius)
                img.set(static_cast<int>(std::lround(center.x)) + dx,
                        static_cast<int>(std::lround(center.y)) + dy, color);
}

void draw_ring(Image& img, Vec2f center, float radius, Rgb color) {
    const int steps = std::max(8, static_cast<int>(radius * 8));
    for (int i = 0; i < steps; ++i) {
        const float a = 2.0f * 3.14159265f * i / steps;
        img.set(static_cast<int>(std::lround(center.x + radius * std::cos(a))),
                static_cast<int>(std::lround(center.y + radius * std::sin(a))), color);
    }
}

void render_frame(Image& img, const FrameAnnotation& frame, const SkeletonTopology& topo) {
    for (const PoseAnnotation& pose : frame.poses) {
        const Rgb limb_color =
            kLimbPalette[static_cast<std::size_t>(pose.person_id) % std::size(kLimbPalette)];
        for (const Limb& limb : topo.limbs) {
            const auto& a = pose.keypoint(limb.a);
            const auto& b = pose.keypoint(limb.b);
            if (a && b) draw_line(img, a->position_px, b->position_px, limb_color);
        }
        for (int j = 0; j < kJointCount; ++j) {
            const auto& kp = pose.keypoints[j];
            if (!kp) continue;
            if (kp->occluded)
                draw_disc(img, kp->position_px, 3.0f, kOccludedJoint);
            else if (kp->self_occluded)
                draw_disc(img, kp->position_px, 3.0f, kSelfOccludedJoint);
            else
                draw_disc(img, kp->position_px, 3.0f, kVisibleJoint);
        }
    }
}

}  // namespace paftrack
