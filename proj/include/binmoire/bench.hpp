// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Packed XNOR-popcount conv vs a float conv over the same ±1 operands.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace binmoire {

struct BenchConfig {
    std::size_t in_channels = 64;
    std::size_t out_channels = 64;
    std::size_t kernel = 3;
    std::size_t hw = 128;
    std::size_t iters = 5;
    std::uint64_t seed = 1;

    /// Throws ConfigError on zero sizes, even kernels or iters == 0.
    void validate() const;
};

struct BenchResult {
    BenchConfig config;
    bool equal = false;       ///< both paths agreed exactly before timing
    std::uint64_t macs = 0;   ///< per conv call
    double packed_ns = 0.0;   ///< median per call, activation packing included
    double float_ns = 0.0;
    std::string isa;

    double packed_gops() const { return packed_ns > 0 ? static_cast<double>(macs) / packed_ns : 0.0; }
    double float_gops() const { return float_ns > 0 ? static_cast<double>(macs) / float_ns : 0.0; }
    double ratio() const { return packed_ns > 0 ? float_ns / packed_ns : 0.0; }
    std::string text() const;
};

/// Equality is checked first; when it fails nothing is timed.
BenchResult run_bench(const BenchConfig& cfg);

} // namespace binmoire
