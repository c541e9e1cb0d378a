// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "paftrack/geometry.hpp"

namespace paftrack::kernels {

// Inner-loop kernels behind field synthesis and loss evaluation. A scalar
// reference implementation always exists; wider variants are selected at
// runtime and equivalence-tested against it. Membership tests and coverage
// sums are bit-identical across backends (same fused-multiply-add sequence);
// the Gaussian kernel may differ from the reference by ~1e-6 because the
// vector backend uses a polynomial exp.
struct Ops {
    const char* name;

    // dst[i] = max(dst[i], exp(-((dx0 + i)^2 + dy2) * inv_sigma_sq)), i in [0, n)
    void (*gaussian_row_max)(float* dst, int n, float dx0, float dy2, float inv_sigma_sq);

    // sum of m[i] * (a[i] - b[i])^2 accumulated in double
    double (*masked_sse)(const float* a, const float* b, const float* m, std::size_t n);

    // For pixels p = (px0 + i, py), i in [0, n): if the distance from p to the
    // segment {a + t*dir, t in [0, seg_len]} is <= sqrt(half_width_sq), add
    // `value` to (sum_x[i], sum_y[i]) and 1 to count[i]. `dir` must be unit
    // length unless seg_len == 0, in which case the segment is the point `a`.
    void (*segment_cover_row)(float* sum_x, float* sum_y, float* count, int n, float px0, float py,
                              Vec2f a, Vec2f dir, float seg_len, float half_width_sq, Vec2f value);

    // Where count[i] > 0: x[i] /= count[i], y[i] /= count[i].
    void (*average_where_covered)(float* x, float* y, const float* count, std::size_t n);
};

// Runtime-selected backend. Honors PAFTRACK_KERNELS=scalar|avx2 when set and
// supported; otherwise picks the widest backend the CPU offers.
const Ops& ops();

const Ops& scalar_ops();

// nullptr when the build or the CPU lacks AVX2+FMA.
const Ops* avx2_ops();

}  // namespace paftrack::kernels
