// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "binmoire/tensor.hpp"

namespace binmoire {

/// 10 log10(peak^2 / MSE), accumulated in double. Identical inputs give
/// +infinity.
double psnr(const FloatTensor& a, const FloatTensor& b, double peak = 1.0);

/// Mean SSIM over non-overlapping window x window tiles of every (b, c)
/// plane, uniform weights, population moments, C1 = (0.01 L)^2,
/// C2 = (0.03 L)^2. Partial tiles at the right/bottom edges are skipped.
double ssim(const FloatTensor& a, const FloatTensor& b, std::size_t window = 8, double data_range = 1.0);

/// Copy with every value clamped to [0, 1].
FloatTensor clamp01(const FloatTensor& x);

} // namespace binmoire
