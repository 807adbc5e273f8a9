// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#if defined(__aarch64__)

#include <arm_neon.h>

#include "binmoire/simd/kernels.hpp"

namespace binmoire::simd {
namespace {

void xor_popcount_rows_neon(const std::uint64_t* patch, const std::uint64_t* filters, std::size_t words,
                            std::size_t n_filters, std::int32_t* out) {
    for (std::size_t r = 0; r < n_filters; ++r) {
        const std::uint64_t* f = filters + r * words;
        uint64x2_t acc = vdupq_n_u64(0);
        std::size_t i = 0;
        for (; i + 2 <= words; i += 2) {
            const uint64x2_t x = veorq_u64(vld1q_u64(patch + i), vld1q_u64(f + i));
            acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(vcntq_u8(vreinterpretq_u8_u64(x))))));
        }
        std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
        for (; i < words; ++i) total += static_cast<std::uint64_t>(__builtin_popcountll(patch[i] ^ f[i]));
        out[r] = static_cast<std::int32_t>(total);
    }
}

void axpy_neon(float a, const float* x, float* y, std::size_t n) {
    const float32x4_t va = vdupq_n_f32(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vaddq_f32(vld1q_f32(y + i), vmulq_f32(va, vld1q_f32(x + i))));
    for (; i < n; ++i) {
        const float p = a * x[i];
        y[i] = y[i] + p;
    }
}

float dot_neon(const float* x, const float* y, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = vaddq_f32(acc, vmulq_f32(vld1q_f32(x + i), vld1q_f32(y + i)));
    float total = (vgetq_lane_f32(acc, 0) + vgetq_lane_f32(acc, 1)) + (vgetq_lane_f32(acc, 2) + vgetq_lane_f32(acc, 3));
    for (; i < n; ++i) total += x[i] * y[i];
    return total;
}

} // namespace

namespace detail {
const KernelTable kNeonTable{Isa::Neon, &xor_popcount_rows_neon, &axpy_neon, &dot_neon};
} // namespace detail

} // namespace binmoire::simd

#endif
