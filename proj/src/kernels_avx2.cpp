// SPDX-License-Identifier: Apache-2.0
// AVX2+FMA variants of the field kernels. Compiled with -mavx2 -mfma and
// reached only through the runtime dispatch in kernels_dispatch.cpp.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "paftrack/kernels.hpp"

namespace paftrack::kernels {
namespace {

// Cephes-style single-precision exp. Inputs here are always <= 0; the lower
// clamp avoids junk from the 2^n scaling for deeply negative arguments.
inline __m256 exp256_ps(__m256 x) {
    const __m256 min_x = _mm256_set1_ps(-87.0f);
    const __m256 log2e = _mm256_set1_ps(1.44269504088896341f);
    const __m256 ln2_hi = _mm256_set1_ps(0.693359375f);
    const __m256 ln2_lo = _mm256_set1_ps(-2.12194440e-4f);
    const __m256 c0 = _mm256_set1_ps(1.9875691500e-4f);
    const __m256 c1 = _mm256_set1_ps(1.3981999507e-3f);
    const __m256 c2 = _mm256_set1_ps(8.3334519073e-3f);
    const __m256 c3 = _mm256_set1_ps(4.1665795894e-2f);
    const __m256 c4 = _mm256_set1_ps(1.6666665459e-1f);
    const __m256 c5 = _mm256_set1_ps(5.0000001201e-1f);
    const __m256 one = _mm256_set1_ps(1.0f);

    x = _mm256_max_ps(x, min_x);
    __m256 fn = _mm256_floor_ps(_mm256_fmadd_ps(x, log2e, _mm256_set1_ps(0.5f)));
    x = _mm256_fnmadd_ps(fn, ln2_hi, x);
    x = _mm256_fnmadd_ps(fn, ln2_lo, x);

    __m256 p = c0;
    p = _mm256_fmadd_ps(p, x, c1);
    p = _mm256_fmadd_ps(p, x, c2);
    p = _mm256_fmadd_ps(p, x, c3);
    p = _mm256_fmadd_ps(p, x, c4);
    p = _mm256_fmadd_ps(p, x, c5);
    const __m256 x2 = _mm256_mul_ps(x, x);
    p = _mm256_fmadd_ps(p, x2, _mm256_add_ps(x, one));

    const __m256i n = _mm256_cvtps_epi32(fn);
    const __m256i pow2 = _mm256_slli_epi32(_mm256_add_epi32(n, _mm256_set1_epi32(127)), 23);
    return _mm256_mul_ps(p, _mm256_castsi256_ps(pow2));
}

void gaussian_row_max_avx2(float* dst, int n, float dx0, float dy2, float inv_sigma_sq) {
    const __m256 ramp = _mm256_setr_ps(0, 1, 2, 3, 4, 5, 6, 7);
    const __m256 vdy2 = _mm256_set1_ps(dy2);
    const __m256 vneg_inv = _mm256_set1_ps(-inv_sigma_sq);
    const __m256 vdx0 = _mm256_set1_ps(dx0);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 dx =
            _mm256_add_ps(vdx0, _mm256_add_ps(ramp, _mm256_set1_ps(static_cast<float>(i))));
        const __m256 r2 = _mm256_fmadd_ps(dx, dx, vdy2);
        const __m256 v = exp256_ps(_mm256_mul_ps(r2, vneg_inv));
        const __m256 cur = _mm256_loadu_ps(dst + i);
        _mm256_storeu_ps(dst + i, _mm256_max_ps(cur, v));
    }
    for (; i < n; ++i) {
        const float dx = dx0 + static_cast<float>(i);
        const float v = std::exp(-std::fma(dx, dx, dy2) * inv_sigma_sq);
        if (v > dst[i]) dst[i] = v;
    }
}

double masked_sse_avx2(const float* a, const float* b, const float* m, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        const __m256 vm = _mm256_loadu_ps(m + i);
        const __m256d dlo = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                          _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
        const __m256d dhi = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                          _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
        const __m256d mlo = _mm256_cvtps_pd(_mm256_castps256_ps128(vm));
        const __m256d mhi = _mm256_cvtps_pd(_mm256_extractf128_ps(vm, 1));
        acc0 = _mm256_fmadd_pd(mlo, _mm256_mul_pd(dlo, dlo), acc0);
        acc1 = _mm256_fmadd_pd(mhi, _mm256_mul_pd(dhi, dhi), acc1);
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        total += static_cast<double>(m[i]) * (d * d);
    }
    return total;
}

void segment_cover_row_avx2(float* sum_x, float* sum_y, float* count, int n, float px0, float py,
                            Vec2f a, Vec2f dir, float seg_len, float half_width_sq, Vec2f value) {
    const __m256 ramp = _mm256_setr_ps(0, 1, 2, 3, 4, 5, 6, 7);
    const float ry = py - a.y;
    const __m256 vry_uy = _mm256_set1_ps(ry * dir.y);
    const __m256 vux = _mm256_set1_ps(dir.x);
    const __m256 vuy = _mm256_set1_ps(dir.y);
    const __m256 vry = _mm256_set1_ps(ry);
    const __m256 vlen = _mm256_set1_ps(seg_len);
    const __m256 vhw2 = _mm256_set1_ps(half_width_sq);
    const __m256 vzero = _mm256_setzero_ps();
    const __m256 vvx = _mm256_set1_ps(value.x);
    const __m256 vvy = _mm256_set1_ps(value.y);
    const __m256 vone = _mm256_set1_ps(1.0f);
    const __m256 base = _mm256_set1_ps(px0 - a.x);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 rx =
            _mm256_add_ps(base, _mm256_add_ps(ramp, _mm256_set1_ps(static_cast<float>(i))));
        __m256 t = _mm256_fmadd_ps(rx, vux, vry_uy);
        t = _mm256_min_ps(_mm256_max_ps(t, vzero), vlen);
        const __m256 ddx = _mm256_fnmadd_ps(t, vux, rx);
        const __m256 ddy = _mm256_fnmadd_ps(t, vuy, vry);
        const __m256 d2 = _mm256_fmadd_ps(ddx, ddx, _mm256_mul_ps(ddy, ddy));
        const __m256 inside = _mm256_cmp_ps(d2, vhw2, _CMP_LE_OQ);
        _mm256_storeu_ps(sum_x + i,
                         _mm256_add_ps(_mm256_loadu_ps(sum_x + i), _mm256_and_ps(inside, vvx)));
        _mm256_storeu_ps(sum_y + i,
                         _mm256_add_ps(_mm256_loadu_ps(sum_y + i), _mm256_and_ps(inside, vvy)));
        _mm256_storeu_ps(count + i,
                         _mm256_add_ps(_mm256_loadu_ps(count + i), _mm256_and_ps(inside, vone)));
    }
    const float ry_uy = ry * dir.y;
    for (; i < n; ++i) {
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

void average_where_covered_avx2(float* x, float* y, const float* count, std::size_t n) {
    const __m256 vzero = _mm256_setzero_ps();
    const __m256 vone = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 c = _mm256_loadu_ps(count + i);
        const __m256 covered = _mm256_cmp_ps(c, vzero, _CMP_GT_OQ);
        const __m256 safe = _mm256_blendv_ps(vone, c, covered);
        const __m256 vx = _mm256_loadu_ps(x + i);
        const __m256 vy = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(x + i, _mm256_blendv_ps(vx, _mm256_div_ps(vx, safe), covered));
        _mm256_storeu_ps(y + i, _mm256_blendv_ps(vy, _mm256_div_ps(vy, safe), covered));
    }
    for (; i < n; ++i) {
        if (count[i] > 0.0f) {
            x[i] /= count[i];
            y[i] /= count[i];
        }
    }
}

}  // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Ops ops{
        "avx2",
        gaussian_row_max_avx2,
        masked_sse_avx2,
        segment_cover_row_avx2,
        average_where_covered_avx2,
    };
    return &ops;
}

}  // namespace paftrack::kernels
