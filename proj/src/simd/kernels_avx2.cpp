// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// AVX2 variants, compiled with -mavx2 -mpopcnt (no FMA, so axpy rounds
// exactly like the scalar reference).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>

#include "binmoire/simd/kernels.hpp"

namespace binmoire::simd {
namespace {

// Per-byte popcount via the nibble lookup table (Mula's method).
inline __m256i popcount_bytes(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
}

// Four filters per pass: lane j of the accumulator counts filter r + j, so
// the horizontal byte sum (_mm256_sad_epu8) lands each filter in its own
// 64-bit lane and no cross-lane reduction is needed.
void xor_popcount_rows_avx2(const std::uint64_t* patch, const std::uint64_t* filters, std::size_t words,
                            std::size_t n_filters, std::int32_t* out) {
    const __m256i zero = _mm256_setzero_si256();
    std::size_t r = 0;
    for (; r + 4 <= n_filters; r += 4) {
        const std::uint64_t* f0 = filters + r * words;
        const std::uint64_t* f1 = f0 + words;
        const std::uint64_t* f2 = f1 + words;
        const std::uint64_t* f3 = f2 + words;
        __m256i acc = zero;
        for (std::size_t i = 0; i < words; ++i) {
            const __m256i f = _mm256_setr_epi64x(static_cast<long long>(f0[i]), static_cast<long long>(f1[i]),
                                                 static_cast<long long>(f2[i]), static_cast<long long>(f3[i]));
            const __m256i x = _mm256_xor_si256(f, _mm256_set1_epi64x(static_cast<long long>(patch[i])));
            acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(x), zero));
        }
        alignas(32) std::uint64_t lanes[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
        out[r] = static_cast<std::int32_t>(lanes[0]);
        out[r + 1] = static_cast<std::int32_t>(lanes[1]);
        out[r + 2] = static_cast<std::int32_t>(lanes[2]);
        out[r + 3] = static_cast<std::int32_t>(lanes[3]);
    }
    for (; r < n_filters; ++r) {
        const std::uint64_t* f = filters + r * words;
        std::int32_t acc = 0;
        for (std::size_t i = 0; i < words; ++i) acc += std::popcount(patch[i] ^ f[i]);
        out[r] = acc;
    }
}

void axpy_avx2(float a, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        __m256 y0 = _mm256_loadu_ps(y + i);
        __m256 y1 = _mm256_loadu_ps(y + i + 8);
        y0 = _mm256_add_ps(y0, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
        y1 = _mm256_add_ps(y1, _mm256_mul_ps(va, _mm256_loadu_ps(x + i + 8)));
        _mm256_storeu_ps(y + i, y0);
        _mm256_storeu_ps(y + i + 8, y1);
    }
    for (; i + 8 <= n; i += 8) {
        const __m256 y0 = _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
        _mm256_storeu_ps(y + i, y0);
    }
    for (; i < n; ++i) {
        const float p = a * x[i];
        y[i] = y[i] + p;
    }
}

float dot_avx2(const float* x, const float* y, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_add_ps(acc0, _mm256_mul_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
        acc1 = _mm256_add_ps(acc1, _mm256_mul_ps(_mm256_loadu_ps(x + i + 8), _mm256_loadu_ps(y + i + 8)));
    }
    acc0 = _mm256_add_ps(acc0, acc1);
    for (; i + 8 <= n; i += 8)
        acc0 = _mm256_add_ps(acc0, _mm256_mul_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    alignas(32) float lanes[8];
    _mm256_store_ps(lanes, acc0);
    float acc = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

} // namespace

namespace detail {
const KernelTable kAvx2Table{Isa::Avx2, &xor_popcount_rows_avx2, &axpy_avx2, &dot_avx2};
} // namespace detail

} // namespace binmoire::simd

#endif
