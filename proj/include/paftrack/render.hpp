// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paftrack/io_error.hpp"
#include "paftrack/topology.hpp"
#include "paftrack/types.hpp"

namespace paftrack {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

    Image() = default;
    Image(int w, int h, Rgb fill = {});
    void set(int x, int y, Rgb c);
};

Image load_ppm(const std::string& path);       // binary P6, maxval 255
void save_ppm(const std::string& path, const Image& img);

void draw_line(Image& img, Vec2f a, Vec2f b, Rgb color);
void draw_disc(Image& img, Vec2f center, float radius, Rgb color);
void draw_ring(Image& img, Vec2f center, float radius, Rgb color);

// Skeleton overlays: limbs in a per-person hue, visible joints as green
// discs, occluded joints red, self-occluded yellow.
void render_frame(Image& img, const FrameAnnotation& frame, const SkeletonTopology& topo);

}  // namespace paftrack
