// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include "binmoire/binarize.hpp"
#include "binmoire/binconv.hpp"
#include "binmoire/error.hpp"
#include "binmoire/float_conv.hpp"
#include "binmoire/rng.hpp"
#include "binmoire/simd/kernels.hpp"

namespace binmoire {

void BenchConfig::validate() const {
    if (iters == 0) throw ConfigError("bench: --iters must be >= 1");
    if (in_channels == 0 || out_channels == 0 || hw == 0) throw ConfigError("bench: sizes must be >= 1");
    if (kernel == 0 || kernel % 2 == 0) throw ConfigError("bench: --k must be odd");
}

std::string BenchResult::text() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "conv %zu->%zu k=%zu hw=%zu iters=%zu isa=%s\n"
                  "paths equal: %s\n"
                  "packed xnor: %12.0f ns/op  %8.3f GOP/s\n"
                  "float:       %12.0f ns/op  %8.3f GOP/s\n"
                  "speedup:     %.2fx\n",
                  config.in_channels, config.out_channels, config.kernel, config.hw, config.iters, isa.c_str(),
                  equal ? "yes" : "NO", packed_ns, packed_gops(), float_ns, float_gops(), ratio());
    return buf;
}

namespace {

template <class F>
double median_ns(std::size_t iters, F&& f) {
    std::vector<double> t;
    t.reserve(iters);
    for (std::size_t i = 0; i < iters; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        t.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

} // namespace

BenchResult run_bench(const BenchConfig& cfg) {
    cfg.validate();
    BenchResult res;
    res.config = cfg;
    res.isa = std::string(simd::isa_name(simd::active().isa));
    const ConvSpec spec{cfg.in_channels, cfg.out_channels, cfg.kernel, 1, cfg.kernel / 2};
    const Shape xs{1, cfg.in_channels, cfg.hw, cfg.hw};
    const Shape os = spec.output_shape(xs);
    res.macs = static_cast<std::uint64_t>(os.c) * os.h * os.w * cfg.in_channels * cfg.kernel * cfg.kernel;

    Rng r(mix_seed(cfg.seed, 0x62656e63ull));
    FloatTensor x(xs), w(spec.weight_shape());
    for (float& v : x.data()) v = (r.bits() & 1u) != 0 ? 1.0f : -1.0f;
    for (float& v : w.data()) v = (r.bits() & 1u) != 0 ? 1.0f : -1.0f;
    const BitTensor wb = pack(w, PackAxis::Filter);
    const float minus_one = -1.0f;

    auto packed = [&] { return xnor_conv2d(pack(x, PackAxis::Width), wb, spec); };
    auto dense = [&] { return conv2d_valid(pad_planes(x, spec.padding, std::span<const float>(&minus_one, 1)), w, 1); };

    res.equal = packed() == dense();
    if (!res.equal) return res;
    res.packed_ns = median_ns(cfg.iters, [&] { (void)packed(); });
    res.float_ns = median_ns(cfg.iters, [&] { (void)dense(); });
    return res;
}

} // namespace binmoire
