// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mpopcnt: the scalar loop, but std::popcount becomes one
// POPCNT instruction. Float kernels are shared with the reference table.

#if defined(__x86_64__) || defined(_M_X64)

#include <bit>

#include "binmoire/simd/kernels.hpp"

namespace binmoire::simd {
namespace {

void xor_popcount_rows_popcnt(const std::uint64_t* patch, const std::uint64_t* filters, std::size_t words,
                              std::size_t n_filters, std::int32_t* out) {
    std::size_t r = 0;
    // Two filters per pass so each patch word is loaded once for both.
    for (; r + 2 <= n_filters; r += 2) {
        const std::uint64_t* f0 = filters + r * words;
        const std::uint64_t* f1 = f0 + words;
        std::int32_t a0 = 0, a1 = 0;
        for (std::size_t i = 0; i < words; ++i) {
            const std::uint64_t p = patch[i];
            a0 += std::popcount(p ^ f0[i]);
            a1 += std::popcount(p ^ f1[i]);
        }
        out[r] = a0;
        out[r + 1] = a1;
    }
    for (; r < n_filters; ++r) {
        const std::uint64_t* f = filters + r * words;
        std::int32_t acc = 0;
        for (std::size_t i = 0; i < words; ++i) acc += std::popcount(patch[i] ^ f[i]);
        out[r] = acc;
    }
}

} // namespace

namespace detail {
const KernelTable kPopcntTable{Isa::Popcnt, &xor_popcount_rows_popcnt, kScalarTable.axpy, kScalarTable.dot};
} // namespace detail

} // namespace binmoire::simd

#endif
