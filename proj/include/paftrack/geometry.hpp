// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

namespace paftrack {

struct Vec2f {
    float x = 0.0f;
    float y = 0.0f;

    Vec2f operator+(Vec2f o) const { return {x + o.x, y + o.y}; }
    Vec2f operator-(Vec2f o) const { return {x - o.x, y - o.y}; }
    Vec2f operator*(float s) const { return {x * s, y * s}; }
    float dot(Vec2f o) const { return x * o.x + y * o.y; }
    float squared_norm() const { return x * x + y * y; }
    float norm() const { return std::sqrt(squared_norm()); }
    bool operator==(const Vec2f&) const = default;
};

// Axis-aligned box; empty when x1 <= x0 or y1 <= y0.
struct Boxf {
    float x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    float width() const { return x1 - x0; }
    float height() const { return y1 - y0; }
    float area() const { return std::max(0.0f, width()) * std::max(0.0f, height()); }
    Vec2f center() const { return {(x0 + x1) * 0.5f, (y0 + y1) * 0.5f}; }
    float diagonal() const { return std::sqrt(width() * width() + height() * height()); }
    bool contains(Vec2f p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

    // Grows every side by `fraction` of the corresponding extent.
    Boxf expanded(float fraction) const {
        const float dx = width() * fraction;
        const float dy = height() * fraction;
        return {x0 - dx, y0 - dy, x1 + dx, y1 + dy};
    }

    void include(Vec2f p) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
};

inline float iou(const Boxf& a, const Boxf& b) {
    const float ix0 = std::max(a.x0, b.x0);
    const float iy0 = std::max(a.y0, b.y0);
    const float ix1 = std::min(a.x1, b.x1);
    const float iy1 = std::min(a.y1, b.y1);
    const float inter = std::max(0.0f, ix1 - ix0) * std::max(0.0f, iy1 - iy0);
    const float uni = a.area() + b.area() - inter;
    return uni > 0.0f ? inter / uni : 0.0f;
}

// Squared distance from p to the segment [a, b], endpoints included.
inline float point_segment_distance_sq(Vec2f p, Vec2f a, Vec2f b) {
    const Vec2f d = b - a;
    const float len_sq = d.squared_norm();
    float t = 0.0f;
    if (len_sq > 0.0f) t = std::clamp((p - a).dot(d) / len_sq, 0.0f, 1.0f);
    const Vec2f proj = a + d * t;
    return (p - proj).squared_norm();
}

}  // namespace paftrack
