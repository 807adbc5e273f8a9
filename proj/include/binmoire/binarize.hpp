// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "binmoire/bit_tensor.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

/// Learnable per-channel activation threshold, added before the sign.
struct ThresholdVector {
    std::vector<float> values;

    static ThresholdVector zeros(std::size_t channels) { return {std::vector<float>(channels, 0.0f)}; }
};

/// Per-output-channel weight scale: mean |w| over each filter. Held in double
/// so it matches a double loop oracle to 1e-12.
struct AlphaVector {
    std::vector<double> values;
};

/// out = +1 where x + t[c] >= 0, else -1. sign(0) is +1.
BitTensor sign_binarize(const FloatTensor& x, const ThresholdVector& t);

/// sign(w) packed along the flattened (C_in, K, K) filter axis.
BitTensor sign_binarize_weights(const FloatTensor& w);

/// Pack a tensor whose entries are exactly ±1. Throws DomainError otherwise.
BitTensor pack(const FloatTensor& x, PackAxis axis = PackAxis::Width);

FloatTensor unpack(const BitTensor& x);

AlphaVector compute_alpha(const FloatTensor& w);

} // namespace binmoire
