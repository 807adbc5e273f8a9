// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>

#include "binmoire/simd/kernels.hpp"

namespace binmoire::simd {

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Popcnt: return "popcnt";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

CpuFeatures detect_cpu() {
    CpuFeatures f;
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    f.popcnt = __builtin_cpu_supports("popcnt");
    f.avx2 = __builtin_cpu_supports("avx2") && f.popcnt;
#endif
#if defined(__aarch64__)
    f.neon = true;
#endif
    return f;
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out{Isa::Scalar};
    [[maybe_unused]] const CpuFeatures f = detect_cpu();
#if defined(__x86_64__) || defined(_M_X64)
    if (f.popcnt) out.push_back(Isa::Popcnt);
    if (f.avx2) out.push_back(Isa::Avx2);
#endif
#if defined(__aarch64__)
    if (f.neon) out.push_back(Isa::Neon);
#endif
    return out;
}

const KernelTable& kernels_for(Isa isa) {
    for (Isa a : available_isas()) {
        if (a != isa) continue;
        switch (isa) {
        case Isa::Scalar: return detail::kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Popcnt: return detail::kPopcntTable;
        case Isa::Avx2: return detail::kAvx2Table;
#endif
#if defined(__aarch64__)
        case Isa::Neon: return detail::kNeonTable;
#endif
        default: break;
        }
    }
    throw std::invalid_argument("kernel variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
}

namespace {

std::atomic<bool> g_fault{false};
std::atomic<const KernelTable*> g_active{nullptr};
std::once_flag g_init;

void xor_popcount_rows_faulty(const std::uint64_t* patch, const std::uint64_t* filters, std::size_t words,
                              std::size_t n_filters, std::int32_t* out) {
    g_active.load()->xor_popcount_rows(patch, filters, words, n_filters, out);
    if (n_filters > 0) out[0] += 1;
}

Isa isa_from_env(Isa fallback) {
    const char* env = std::getenv("BINMOIRE_ISA");
    if (env == nullptr) return fallback;
    const std::string name(env);
    for (Isa a : available_isas())
        if (isa_name(a) == name) return a;
    return fallback;
}

void initialise() {
    const auto isas = available_isas();
    const Isa best = isa_from_env(isas.back());
    g_active.store(&kernels_for(best));
    if (const char* f = std::getenv("BINMOIRE_FAULT_INJECT"); f != nullptr && std::string(f) == "1")
        g_fault.store(true);
}

} // namespace

const KernelTable& active() {
    std::call_once(g_init, initialise);
    const KernelTable* base = g_active.load();
    if (!g_fault.load()) return *base;
    thread_local KernelTable faulty{};
    faulty = KernelTable{base->isa, &xor_popcount_rows_faulty, base->axpy, base->dot};
    return faulty;
}

void set_active(Isa isa) {
    std::call_once(g_init, initialise);
    g_active.store(&kernels_for(isa));
}

void set_fault_injection(bool enabled) {
    std::call_once(g_init, initialise);
    g_fault.store(enabled);
}

bool fault_injection_enabled() {
    std::call_once(g_init, initialise);
    return g_fault.load();
}

} // namespace binmoire::simd
