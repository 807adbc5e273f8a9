// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/binconv.hpp"

#include <string>

#include "binmoire/parallel.hpp"
#include "binmoire/simd/kernels.hpp"

namespace binmoire {

Shape ConvSpec::output_shape(const Shape& in) const {
    if (kernel == 0 || stride == 0) throw DimensionError("conv: kernel and stride must be >= 1");
    if (in.c != in_channels)
        throw DimensionError("conv: input has " + std::to_string(in.c) + " channels, spec expects " +
                             std::to_string(in_channels));
    if (in.h + 2 * padding < kernel || in.w + 2 * padding < kernel)
        throw DimensionError("conv: kernel " + std::to_string(kernel) + " larger than padded input " + in.str());
    return {in.n, out_channels, (in.h + 2 * padding - kernel) / stride + 1, (in.w + 2 * padding - kernel) / stride + 1};
}

bool GateVector::uniform_per_sample() const {
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 1; c < channels; ++c)
            if (values[b * channels + c] != values[b * channels]) return false;
    return true;
}

namespace {

constexpr std::size_t kW = BitTensor::kWordBits;

// `count` (<= 64) consecutive bits of a packed row starting at signed column
// x0; columns outside [0, width) read as 0 (logical -1 padding).
std::uint64_t extract_bits(const std::uint64_t* row, std::size_t width, long x0, std::size_t count) {
    const long w = static_cast<long>(width);
    if (x0 >= 0 && x0 + static_cast<long>(count) <= w) {
        const std::size_t start = static_cast<std::size_t>(x0);
        const std::size_t word = start / kW;
        const std::size_t shift = start % kW;
        std::uint64_t v = row[word] >> shift;
        if (shift != 0 && shift + count > kW) v |= row[word + 1] << (kW - shift);
        return count == kW ? v : v & ((std::uint64_t{1} << count) - 1);
    }
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const long x = x0 + static_cast<long>(k);
        if (x < 0 || x >= w) continue;
        const std::size_t ux = static_cast<std::size_t>(x);
        v |= ((row[ux / kW] >> (ux % kW)) & 1u) << k;
    }
    return v;
}

void insert_bits(std::uint64_t* patch, std::size_t offset, std::uint64_t bits, std::size_t count) {
    const std::size_t word = offset / kW;
    const std::size_t shift = offset % kW;
    patch[word] |= bits << shift;
    if (shift != 0 && shift + count > kW) patch[word + 1] |= bits >> (kW - shift);
}

void check_operands(const BitTensor& xb, const BitTensor& wb, const ConvSpec& spec) {
    if (xb.axis() != PackAxis::Width) throw DimensionError("xnor_conv2d: activations must be packed along width");
    if (wb.axis() != PackAxis::Filter) throw DimensionError("xnor_conv2d: weights must be packed along the filter axis");
    if (wb.shape() != spec.weight_shape())
        throw DimensionError("xnor_conv2d: weight shape " + wb.shape().str() + " != spec " +
                             spec.weight_shape().str());
    if (spec.kernel > kW) throw DimensionError("xnor_conv2d: kernel wider than 64 is not supported");
    (void)spec.output_shape(xb.shape());
}

} // namespace

std::vector<std::int32_t> xnor_conv2d_counts(const BitTensor& xb, const BitTensor& wb, const ConvSpec& spec) {
    check_operands(xb, wb, spec);
    const Shape in = xb.shape();
    const Shape out = spec.output_shape(in);
    const std::size_t K = spec.kernel;
    const std::size_t N = spec.in_channels * K * K;
    const std::size_t words = wb.words_per_row();
    const auto& kern = simd::active();
    const std::uint64_t* filters = wb.words().data();
    const long pad = static_cast<long>(spec.padding);

    std::vector<std::int32_t> result(out.size());
    // One task per (batch, output row).
    parallel_for(out.n * out.h, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint64_t> patches(out.w * words);
        std::vector<std::int32_t> mismatches(out.c);
        for (std::size_t task = begin; task < end; ++task) {
            const std::size_t b = task / out.h;
            const std::size_t i = task % out.h;
            std::fill(patches.begin(), patches.end(), 0);
            for (std::size_t c = 0; c < spec.in_channels; ++c) {
                for (std::size_t u = 0; u < K; ++u) {
                    const long y = static_cast<long>(i * spec.stride + u) - pad;
                    if (y < 0 || y >= static_cast<long>(in.h)) continue; // all -1: bits stay 0
                    const std::uint64_t* row = xb.row((b * in.c + c) * in.h + static_cast<std::size_t>(y)).data();
                    const std::size_t offset = (c * K + u) * K;
                    for (std::size_t j = 0; j < out.w; ++j) {
                        const long x0 = static_cast<long>(j * spec.stride) - pad;
                        const std::uint64_t bits = extract_bits(row, in.w, x0, K);
                        if (bits != 0) insert_bits(patches.data() + j * words, offset, bits, K);
                    }
                }
            }
            for (std::size_t j = 0; j < out.w; ++j) {
                kern.xor_popcount_rows(patches.data() + j * words, filters, words, out.c, mismatches.data());
                for (std::size_t o = 0; o < out.c; ++o)
                    result[((b * out.c + o) * out.h + i) * out.w + j] =
                        static_cast<std::int32_t>(N) - 2 * mismatches[o];
            }
        }
    });
    return result;
}

FloatTensor xnor_conv2d(const BitTensor& xb, const BitTensor& wb, const ConvSpec& spec) {
    const Shape out = spec.output_shape(xb.shape());
    const auto counts = xnor_conv2d_counts(xb, wb, spec);
    FloatTensor result(out);
    for (std::size_t i = 0; i < counts.size(); ++i) result[i] = static_cast<float>(counts[i]);
    return result;
}

namespace {

// Single input channel c of a width-packed activation tensor.
BitTensor slice_channel(const BitTensor& xb, std::size_t c) {
    const Shape s = xb.shape();
    BitTensor out({s.n, 1, s.h, s.w}, PackAxis::Width);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t y = 0; y < s.h; ++y) {
            auto src = xb.row((b * s.c + c) * s.h + y);
            auto dst = out.row(b * s.h + y);
            std::copy(src.begin(), src.end(), dst.begin());
        }
    return out;
}

// Filters W^b[:, c, :, :] as a (C_out, 1, K, K) filter-packed tensor.
BitTensor slice_filter_channel(const FloatTensor& wf, std::size_t c) {
    const Shape s = wf.shape();
    FloatTensor w({s.n, 1, s.h, s.w});
    for (std::size_t o = 0; o < s.n; ++o)
        for (std::size_t u = 0; u < s.h; ++u)
            for (std::size_t v = 0; v < s.w; ++v) w.at(o, 0, u, v) = wf.at(o, c, u, v);
    return sign_binarize_weights(w);
}

} // namespace

FloatTensor gated_binary_conv(const FloatTensor& xf, const FloatTensor& wf, const ThresholdVector& t,
                              const GateVector& beta, const ConvSpec& spec, GatedPath path) {
    const Shape in = xf.shape();
    const Shape out = spec.output_shape(in);
    if (wf.shape() != spec.weight_shape())
        throw DimensionError("gated_binary_conv: weight shape " + wf.shape().str() + " != spec " +
                             spec.weight_shape().str());
    if (beta.batch != in.n || beta.channels != in.c || beta.values.size() != in.n * in.c)
        throw DimensionError("gated_binary_conv: gate must hold " + std::to_string(in.n) + "x" +
                             std::to_string(in.c) + " values");
    for (float v : beta.values)
        if (!(v > 0.0f && v <= 1.0f))
            throw DomainError("gated_binary_conv: gate value " + std::to_string(v) + " outside (0, 1]");

    if (path == GatedPath::Auto) path = beta.uniform_per_sample() ? GatedPath::Packed : GatedPath::Literal;
    if (path == GatedPath::Packed && !beta.uniform_per_sample())
        throw DomainError("gated_binary_conv: packed path requires a per-sample uniform gate");

    const BitTensor xb = sign_binarize(xf, t);
    const AlphaVector alpha = compute_alpha(wf);
    const std::size_t plane = out.plane();
    std::vector<double> acc(out.size(), 0.0);

    if (path == GatedPath::Packed) {
        const auto counts = xnor_conv2d_counts(xb, sign_binarize_weights(wf), spec);
        for (std::size_t b = 0; b < out.n; ++b) {
            const double g = beta.at(b, 0);
            for (std::size_t i = b * out.c * plane; i < (b + 1) * out.c * plane; ++i) acc[i] = g * counts[i];
        }
    } else {
        ConvSpec single = spec;
        single.in_channels = 1;
        for (std::size_t c = 0; c < in.c; ++c) {
            const auto counts = xnor_conv2d_counts(slice_channel(xb, c), slice_filter_channel(wf, c), single);
            for (std::size_t b = 0; b < out.n; ++b) {
                const double g = beta.at(b, c);
                for (std::size_t i = b * out.c * plane; i < (b + 1) * out.c * plane; ++i) acc[i] += g * counts[i];
            }
        }
    }

    FloatTensor result(out);
    for (std::size_t b = 0; b < out.n; ++b)
        for (std::size_t o = 0; o < out.c; ++o) {
            const double a = alpha.values[o];
            const std::size_t base = (b * out.c + o) * plane;
            for (std::size_t p = 0; p < plane; ++p) result[base + p] = static_cast<float>(a * acc[base + p]);
        }
    return result;
}

FloatTensor rprelu(const FloatTensor& x, const RpreluParams& p) {
    const Shape s = x.shape();
    if (p.gamma.size() != s.c || p.zeta.size() != s.c || p.slope.size() != s.c)
        throw DimensionError("rprelu: parameter vectors must have " + std::to_string(s.c) + " entries");
    FloatTensor y(s);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c) {
            const float* src = x.plane(b, c);
            float* dst = y.plane(b, c);
            for (std::size_t i = 0; i < s.plane(); ++i) {
                const float d = src[i] - p.gamma[c];
                dst[i] = (d > 0.0f ? d : p.slope[c] * d) + p.zeta[c];
            }
        }
    return y;
}

} // namespace binmoire
