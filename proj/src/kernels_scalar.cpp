// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "paftrack/kernels.hpp"

namespace paftrack::kernels {
namespace {

void gaussian_row_max_scalar(float* dst, int n, float dx0, float dy2, float inv_sigma_sq) {
    for (int i = 0; i < n; ++i) {
        const float dx = dx0 + static_cast<float>(i);
        const float r2 = std::fma(dx, dx, dy2);
        const float v = std::exp(-r2 * inv_sigma_sq);
        if (v > dst[i]) dst[i] = v;
    }
}

double masked_sse_scalar(const float* a, const float* b, const float* m, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += static_cast<double>(m[i]) * (d * d);
    }
    return acc;
}

// Written with explicit fma to match the vector backend's rounding, so
// coverage decisions are bit-identical across backends.
void segment_cover_row_scalar(float* sum_x, float* sum_y, float* count, int n, float px0, float py,
                              Vec2f a, Vec2f dir, float seg_len, float half_width_sq, Vec2f value) {
    const float ry = py - a.y;
    const float ry_uy = ry * dir.y;
    for (int i = 0; i < n; ++i) {
        const float rx = px0 + static_cast<float>(i) - a.x;
        float t = std::fma(rx, dir.x, ry_uy);
        t = std::clamp(t, 0.0f, seg_len);
        const float ddx = std::fma(-t, dir.x, rx);
        const float ddy = std::fma(-t, dir.y, ry);
        const float d2 = std::fma(ddx, ddx, ddy * ddy);
        if (d2 <= half_width_sq) {
            sum_x[i] += value.x;
            sum_y[i] += value.y;
            count[i] += 1.0f;
        }
    }
}

void average_where_covered_scalar(float* x, float* y, const float* count, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] > 0.0f) {
            x[i] /= count[i];
            y[i] /= count[i];
        }
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{
        "scalar",
        gaussian_row_max_scalar,
        masked_sse_scalar,
        segment_cover_row_scalar,
        average_where_covered_scalar,
    };
    return ops;
}

}  // namespace paftrack::kernels
