// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace binmoire {

double psnr(const FloatTensor& a, const FloatTensor& b, double peak) {
    require_same_shape(a.shape(), b.shape(), "psnr");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    const double mse = acc / static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const FloatTensor& a, const FloatTensor& b, std::size_t window, double data_range) {
    require_same_shape(a.shape(), b.shape(), "ssim");
    const Shape s = a.shape();
    if (window == 0 || s.h < window || s.w < window)
        throw DimensionError("ssim: image " + s.str() + " smaller than window " + std::to_string(window));
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);
    const double n = static_cast<double>(window * window);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < s.n * s.c; ++p) {
        const float* pa = a.raw() + p * s.plane();
        const float* pb = b.raw() + p * s.plane();
        for (std::size_t y0 = 0; y0 + window <= s.h; y0 += window)
            for (std::size_t x0 = 0; x0 + window <= s.w; x0 += window) {
                double sa = 0.0, sb = 0.0;
                for (std::size_t y = y0; y < y0 + window; ++y)
                    for (std::size_t x = x0; x < x0 + window; ++x) {
                        sa += pa[y * s.w + x];
                        sb += pb[y * s.w + x];
                    }
                const double ma = sa / n, mb = sb / n;
                double va = 0.0, vb = 0.0, cov = 0.0;
                for (std::size_t y = y0; y < y0 + window; ++y)
                    for (std::size_t x = x0; x < x0 + window; ++x) {
                        const double da = pa[y * s.w + x] - ma;
                        const double db = pb[y * s.w + x] - mb;
                        va += da * da;
                        vb += db * db;
                        cov += da * db;
                    }
                va /= n;
                vb /= n;
                cov /= n;
                total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++count;
            }
    }
    return total / static_cast<double>(count);
}

FloatTensor clamp01(const FloatTensor& x) {
    FloatTensor out = x;
    for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
    return out;
}

} // namespace binmoire
