// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/oracle/oracles.hpp"

#include <cmath>
#include <limits>

namespace binmoire::oracle {

FloatTensor sign_loop(const FloatTensor& x, const std::vector<float>& t) {
    const Shape s = x.shape();
    FloatTensor out(s);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t i = 0; i < s.h; ++i)
                for (std::size_t j = 0; j < s.w; ++j)
                    out.at(b, c, i, j) = x.at(b, c, i, j) + t[c] >= 0.0f ? 1.0f : -1.0f;
    return out;
}

FloatTensor naive_pm1_conv(const FloatTensor& x, const FloatTensor& w, const ConvSpec& spec) {
    const Shape s = x.shape();
    const std::size_t k = spec.kernel, st = spec.stride;
    const long p = static_cast<long>(spec.padding);
    const std::size_t oh = (s.h + 2 * spec.padding - k) / st + 1;
    const std::size_t ow = (s.w + 2 * spec.padding - k) / st + 1;
    FloatTensor out({s.n, spec.out_channels, oh, ow});
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t o = 0; o < spec.out_channels; ++o)
            for (std::size_t i = 0; i < oh; ++i)
                for (std::size_t j = 0; j < ow; ++j) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < s.c; ++c)
                        for (std::size_t u = 0; u < k; ++u)
                            for (std::size_t v = 0; v < k; ++v) {
                                const long y = static_cast<long>(i * st + u) - p;
                                const long xx = static_cast<long>(j * st + v) - p;
                                const bool inside = y >= 0 && xx >= 0 && y < static_cast<long>(s.h) &&
                                                    xx < static_cast<long>(s.w);
                                const double a = inside ? x.at(b, c, static_cast<std::size_t>(y), static_cast<std::size_t>(xx)) : -1.0;
                                acc += a * w.at(o, c, u, v);
                            }
                    out.at(b, o, i, j) = static_cast<float>(acc);
                }
    return out;
}

std::vector<double> alpha_loop(const FloatTensor& w) {
    const Shape s = w.shape();
    std::vector<double> a(s.n, 0.0);
    for (std::size_t o = 0; o < s.n; ++o) {
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t u = 0; u < s.h; ++u)
                for (std::size_t v = 0; v < s.w; ++v) a[o] += std::fabs(static_cast<double>(w.at(o, c, u, v)));
        a[o] /= static_cast<double>(s.c * s.h * s.w);
    }
    return a;
}

DoubleTensor gated_conv_reference(const FloatTensor& xf, const FloatTensor& wf, const std::vector<float>& t,
                                  const GateVector& beta, const ConvSpec& spec) {
    const Shape s = xf.shape();
    const FloatTensor xb = sign_loop(xf, t);
    const FloatTensor wb = sign_loop(wf, std::vector<float>(wf.shape().c, 0.0f));
    const std::vector<double> alpha = alpha_loop(wf);
    const std::size_t k = spec.kernel, st = spec.stride;
    const long p = static_cast<long>(spec.padding);
    const std::size_t oh = (s.h + 2 * spec.padding - k) / st + 1;
    const std::size_t ow = (s.w + 2 * spec.padding - k) / st + 1;
    DoubleTensor out({s.n, spec.out_channels, oh, ow});
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t o = 0; o < spec.out_channels; ++o)
            for (std::size_t i = 0; i < oh; ++i)
                for (std::size_t j = 0; j < ow; ++j) {
                    double total = 0.0;
                    for (std::size_t c = 0; c < s.c; ++c) {
                        double chan = 0.0;
                        for (std::size_t u = 0; u < k; ++u)
                            for (std::size_t v = 0; v < k; ++v) {
                                const long y = static_cast<long>(i * st + u) - p;
                                const long xx = static_cast<long>(j * st + v) - p;
                                const bool inside = y >= 0 && xx >= 0 && y < static_cast<long>(s.h) &&
                                                    xx < static_cast<long>(s.w);
                                const double a = inside ? xb.at(b, c, static_cast<std::size_t>(y), static_cast<std::size_t>(xx)) : -1.0;
                                chan += a * wb.at(o, c, u, v);
                            }
                        total += static_cast<double>(beta.at(b, c)) * chan;
                    }
                    out.at(b, o, i, j) = alpha[o] * total;
                }
    return out;
}

FloatTensor rprelu_loop(const FloatTensor& x, const RpreluParams& p) {
    const Shape s = x.shape();
    FloatTensor out(s);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t i = 0; i < s.h; ++i)
                for (std::size_t j = 0; j < s.w; ++j) {
                    const float v = x.at(b, c, i, j);
                    out.at(b, c, i, j) = v > p.gamma[c] ? (v - p.gamma[c]) + p.zeta[c]
                                                        : p.slope[c] * (v - p.gamma[c]) + p.zeta[c];
                }
    return out;
}

std::size_t euclid_gcd(std::size_t a, std::size_t b) {
    while (b != 0) {
        const std::size_t r = a % b;
        a = b;
        b = r;
    }
    return a;
}

std::vector<double> block_diagonal(const SgraParams& p) {
    const SgraGeometry& g = p.geometry;
    std::vector<double> m(g.out_channels * g.in_channels, 0.0);
    for (std::size_t k = 0; k < g.groups; ++k)
        for (std::size_t r = 0; r < g.c_out(); ++r)
            for (std::size_t q = 0; q < g.c_in(); ++q)
                m[(k * g.c_out() + r) * g.in_channels + k * g.c_in() + q] = p.weight(k, r, q);
    return m;
}

FloatTensor dense_project(const FloatTensor& x, const std::vector<double>& m, std::size_t cout, std::size_t stride,
                          bool upsample) {
    const Shape s = x.shape();
    const std::size_t h = upsample ? 2 * s.h : s.h, w = upsample ? 2 * s.w : s.w;
    const std::size_t oh = (h + stride - 1) / stride, ow = (w + stride - 1) / stride;
    FloatTensor out({s.n, cout, oh, ow});
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t i = 0; i < oh; ++i)
                for (std::size_t j = 0; j < ow; ++j) {
                    std::size_t y = i * stride, xx = j * stride;
                    if (upsample) y /= 2, xx /= 2;
                    float acc = 0.0f;
                    for (std::size_t c = 0; c < s.c; ++c) {
                        const double wv = m[o * s.c + c];
                        if (wv != 0.0) acc += static_cast<float>(wv) * x.at(b, c, y, xx);
                    }
                    out.at(b, o, i, j) = acc;
                }
    return out;
}

FloatTensor interleave_loop(const FloatTensor& u, std::size_t g) {
    const Shape s = u.shape();
    const std::size_t m = s.c / g;
    FloatTensor y(s);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t k = 0; k < g; ++k)
            for (std::size_t t = 0; t < m; ++t)
                for (std::size_t i = 0; i < s.h; ++i)
                    for (std::size_t j = 0; j < s.w; ++j) y.at(b, t * g + k, i, j) = u.at(b, k * m + t, i, j);
    return y;
}

PlaneStats plane_stats(const float* p, std::size_t n) {
    double sum = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += p[i];
        abs_sum += std::fabs(static_cast<double>(p[i]));
    }
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (p[i] - mu) * (p[i] - mu);
    return {mu, std::sqrt(ss / static_cast<double>(n)), abs_sum / static_cast<double>(n)};
}

std::array<double, 4> haar_energies_loop(const float* p, std::size_t h, std::size_t w) {
    std::array<double, 4> e{};
    for (std::size_t i = 0; i + 1 < h; i += 2)
        for (std::size_t j = 0; j + 1 < w; j += 2) {
            const double a = p[i * w + j], b = p[i * w + j + 1], c = p[(i + 1) * w + j], d = p[(i + 1) * w + j + 1];
            e[0] += std::fabs(0.5 * (a + b + c + d));
            e[1] += std::fabs(0.5 * (a - b + c - d));
            e[2] += std::fabs(0.5 * (a + b - c - d));
            e[3] += std::fabs(0.5 * (a - b - c + d));
        }
    for (double& v : e) v /= static_cast<double>((h / 2) * (w / 2));
    return e;
}

double psnr_loop(const FloatTensor& a, const FloatTensor& b, double peak) {
    double se = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) se += std::pow(static_cast<double>(a[i]) - b[i], 2);
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak * static_cast<double>(a.size()) / se);
}

double ssim_loop(const FloatTensor& a, const FloatTensor& b, std::size_t win, double range) {
    const Shape s = a.shape();
    const double c1 = std::pow(0.01 * range, 2), c2 = std::pow(0.03 * range, 2);
    std::vector<double> vals;
    for (std::size_t n = 0; n < s.n; ++n)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t by = 0; by < s.h / win; ++by)
                for (std::size_t bx = 0; bx < s.w / win; ++bx) {
                    std::vector<double> xa, xb;
                    for (std::size_t i = 0; i < win; ++i)
                        for (std::size_t j = 0; j < win; ++j) {
                            xa.push_back(a.at(n, c, by * win + i, bx * win + j));
                            xb.push_back(b.at(n, c, by * win + i, bx * win + j));
                        }
                    double ma = 0, mb = 0;
                    for (std::size_t i = 0; i < xa.size(); ++i) ma += xa[i], mb += xb[i];
                    ma /= static_cast<double>(xa.size());
                    mb /= static_cast<double>(xb.size());
                    double va = 0, vb = 0, cv = 0;
                    for (std::size_t i = 0; i < xa.size(); ++i) {
                        va += (xa[i] - ma) * (xa[i] - ma);
                        vb += (xb[i] - mb) * (xb[i] - mb);
                        cv += (xa[i] - ma) * (xb[i] - mb);
                    }
                    const double nn = static_cast<double>(xa.size());
                    va /= nn, vb /= nn, cv /= nn;
                    vals.push_back((2 * ma * mb + c1) * (2 * cv + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2)));
                }
    double acc = 0.0;
    for (double v : vals) acc += v;
    return acc / static_cast<double>(vals.size());
}

} // namespace binmoire::oracle
