// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Portable reference kernels. Built with the baseline target flags, so
// std::popcount lowers to the generic bit-twiddling sequence on x86-64.

#include <bit>

#include "binmoire/simd/kernels.hpp"

namespace binmoire::simd {
namespace {

void xor_popcount_rows_scalar(const std::uint64_t* patch, const std::uint64_t* filters, std::size_t words,
                              std::size_t n_filters, std::int32_t* out) {
    for (std::size_t r = 0; r < n_filters; ++r) {
        const std::uint64_t* f = filters + r * words;
        std::int32_t acc = 0;
        for (std::size_t i = 0; i < words; ++i) acc += std::popcount(patch[i] ^ f[i]);
        out[r] = acc;
    }
}

void axpy_scalar(float a, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float p = a * x[i];
        y[i] = y[i] + p;
    }
}

float dot_scalar(const float* x, const float* y, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

} // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar, &xor_popcount_rows_scalar, &axpy_scalar, &dot_scalar};
} // namespace detail

} // namespace binmoire::simd
