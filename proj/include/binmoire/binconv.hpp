// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "binmoire/binarize.hpp"
#include "binmoire/bit_tensor.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

struct ConvSpec {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t padding = 0;

    /// Throws DimensionError when K or stride is zero or the output would be
    /// empty for `in`.
    Shape output_shape(const Shape& in) const;
    Shape weight_shape() const { return {out_channels, in_channels, kernel, kernel}; }

    friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// Per-sample, per-input-channel gate values.
struct GateVector {
    std::size_t batch = 0;
    std::size_t channels = 0;
    std::vector<float> values; // batch x channels

    static GateVector uniform(std::size_t batch, std::size_t channels, float v) {
        return {batch, channels, std::vector<float>(batch * channels, v)};
    }
    float at(std::size_t b, std::size_t c) const { return values[b * channels + c]; }
    bool uniform_per_sample() const;
};

/// RPReLU: y = (x - gamma) + zeta above the knee, slope * (x - gamma) + zeta
/// below it.
struct RpreluParams {
    std::vector<float> gamma;
    std::vector<float> zeta;
    std::vector<float> slope;

    static RpreluParams identity(std::size_t channels) {
        return {std::vector<float>(channels, 0.0f), std::vector<float>(channels, 0.0f),
                std::vector<float>(channels, 1.0f)};
    }
};

/// Raw XNOR-popcount correlation, one int per output element:
/// out = N - 2 * popcount(patch XOR filter) = 2 * matches - N, N = C_in * K * K.
/// Binary inputs are padded with logical -1.
std::vector<std::int32_t> xnor_conv2d_counts(const BitTensor& xb, const BitTensor& wb, const ConvSpec& spec);

/// Same values as xnor_conv2d_counts, as an integer-valued float tensor.
FloatTensor xnor_conv2d(const BitTensor& xb, const BitTensor& wb, const ConvSpec& spec);

enum class GatedPath {
    Auto,    ///< Packed when the gate is uniform per sample, else Literal.
    Literal, ///< One single-channel binary conv per input channel, gated and summed in ascending c.
    Packed,  ///< One fully packed multi-channel conv; requires a per-sample uniform gate.
};

/// out[b,o] = alpha[o] * sum_c beta[b,c] * (X^b_c * W^b_{o,c}), with
/// X^b = sign(xf + t), W^b = sign(wf), alpha = mean |wf| per filter.
/// The channel sum is accumulated in double; for a per-sample constant gate
/// every partial sum is exact, so Literal and Packed agree bit for bit.
FloatTensor gated_binary_conv(const FloatTensor& xf, const FloatTensor& wf, const ThresholdVector& t,
                              const GateVector& beta, const ConvSpec& spec, GatedPath path = GatedPath::Auto);

FloatTensor rprelu(const FloatTensor& x, const RpreluParams& p);

} // namespace binmoire
