// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Inner-loop kernels with one scalar reference and ISA-specific variants.
// The active table is chosen once at runtime from CPU features; every variant
// must agree with the scalar reference (exactly for integer and element-wise
// kernels, to rounding for float reductions).

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace binmoire::simd {

enum class Isa { Scalar, Popcnt, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct CpuFeatures {
    bool popcnt = false;
    bool avx2 = false;
    bool neon = false;
};

CpuFeatures detect_cpu();

/// out[r] = popcount(patch XOR filters[r]) for r in [0, n_filters), where the
/// filters are stored back to back, `words` 64-bit words each.
using XorPopcountRowsFn = void (*)(const std::uint64_t* patch, const std::uint64_t* filters,
                                   std::size_t words, std::size_t n_filters, std::int32_t* out);

/// y[i] += a * x[i]. Multiply and add are separate roundings in every variant.
using AxpyFn = void (*)(float a, const float* x, float* y, std::size_t n);

/// sum_i x[i] * y[i]; reduction order is fixed per variant.
using DotFn = float (*)(const float* x, const float* y, std::size_t n);

struct KernelTable {
    Isa isa;
    XorPopcountRowsFn xor_popcount_rows;
    AxpyFn axpy;
    DotFn dot;
};

/// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

/// Throws std::invalid_argument when `isa` is unavailable.
const KernelTable& kernels_for(Isa isa);

/// Best available table, or the one named by BINMOIRE_ISA
/// (scalar|popcnt|avx2|neon) when set.
const KernelTable& active();

/// Test hook: force a specific table (pass the best one to reset).
void set_active(Isa isa);

/// Fault-injection hook used to prove the verification suites can fail: when
/// enabled, the active popcount kernel reports one extra mismatch for the
/// first filter of every call. Also enabled by BINMOIRE_FAULT_INJECT=1.
void set_fault_injection(bool enabled);
bool fault_injection_enabled();

namespace detail {
// Per-ISA tables, defined in their own translation units.
extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kPopcntTable;
extern const KernelTable kAvx2Table;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeonTable;
#endif
} // namespace detail

} // namespace binmoire::simd
