// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/float_conv.hpp"

#include <string>
#include <vector>

#include "binmoire/parallel.hpp"
#include "binmoire/simd/kernels.hpp"

namespace binmoire {
namespace {

inline void axpy(float a, const float* x, float* y, std::size_t n) { simd::active().axpy(a, x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}
inline float dot(const float* x, const float* y, std::size_t n) { return simd::active().dot(x, y, n); }
inline double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

// s*s polyphase components of a padded input, each Hc x Wc, zero-filled
// where the component is shorter.
template <class T>
struct Polyphase {
    std::size_t s, hc, wc;
    std::size_t channels;
    std::vector<T> data; // (n, c, s*s, hc, wc)

    const T* comp(std::size_t b, std::size_t c, std::size_t phase) const {
        return data.data() + ((b * channels + c) * s * s + phase) * hc * wc;
    }
    T* comp(std::size_t b, std::size_t c, std::size_t phase) {
        return data.data() + ((b * channels + c) * s * s + phase) * hc * wc;
    }
};

template <class T>
Polyphase<T> make_polyphase(const Shape& s_in, std::size_t s) {
    Polyphase<T> p{s, (s_in.h + s - 1) / s, (s_in.w + s - 1) / s, s_in.c, {}};
    p.data.assign(s_in.n * s_in.c * s * s * p.hc * p.wc, T(0));
    return p;
}

template <class T>
Polyphase<T> split(const BasicTensor<T>& x, std::size_t s) {
    const Shape& sh = x.shape();
    Polyphase<T> p = make_polyphase<T>(sh, s);
    for (std::size_t b = 0; b < sh.n; ++b)
        for (std::size_t c = 0; c < sh.c; ++c) {
            const T* src = x.plane(b, c);
            for (std::size_t y = 0; y < sh.h; ++y)
                for (std::size_t xx = 0; xx < sh.w; ++xx)
                    p.comp(b, c, (y % s) * s + xx % s)[(y / s) * p.wc + xx / s] = src[y * sh.w + xx];
        }
    return p;
}

template <class T>
void merge(const Polyphase<T>& p, BasicTensor<T>& x) {
    const Shape& sh = x.shape();
    const std::size_t s = p.s;
    for (std::size_t b = 0; b < sh.n; ++b)
        for (std::size_t c = 0; c < sh.c; ++c) {
            T* dst = x.plane(b, c);
            for (std::size_t y = 0; y < sh.h; ++y)
                for (std::size_t xx = 0; xx < sh.w; ++xx)
                    dst[y * sh.w + xx] = p.comp(b, c, (y % s) * s + xx % s)[(y / s) * p.wc + xx / s];
        }
}

struct Geometry {
    std::size_t k, s, oh, ow, hc, wc, span;
};

template <class T>
Geometry geometry(const Shape& in, const Shape& w, std::size_t stride) {
    if (w.c != in.c) throw DimensionError("conv2d_valid: weight expects " + std::to_string(w.c) + " channels, input has " + std::to_string(in.c));
    if (w.h != w.w) throw DimensionError("conv2d_valid: square kernels only");
    if (stride == 0) throw DimensionError("conv2d_valid: stride must be >= 1");
    if (in.h < w.h || in.w < w.w) throw DimensionError("conv2d_valid: kernel larger than input");
    Geometry g{};
    g.k = w.h;
    g.s = stride;
    g.oh = (in.h - g.k) / stride + 1;
    g.ow = (in.w - g.k) / stride + 1;
    g.hc = (in.h + stride - 1) / stride;
    g.wc = (in.w + stride - 1) / stride;
    g.span = (g.oh - 1) * g.wc + g.ow;
    return g;
}

// Offset of tap (u, v) inside its polyphase component, and which component.
inline std::size_t tap_phase(const Geometry& g, std::size_t u, std::size_t v) { return (u % g.s) * g.s + v % g.s; }
inline std::size_t tap_offset(const Geometry& g, std::size_t u, std::size_t v) { return (u / g.s) * g.wc + v / g.s; }

} // namespace

template <class T>
BasicTensor<T> pad_planes(const BasicTensor<T>& x, std::size_t pad, std::span<const T> value) {
    const Shape s = x.shape();
    if (value.size() != 1 && value.size() != s.c) throw DimensionError("pad_planes: need 1 or C fill values");
    BasicTensor<T> out({s.n, s.c, s.h + 2 * pad, s.w + 2 * pad});
    const std::size_t pw = s.w + 2 * pad;
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c) {
            T* dst = out.plane(b, c);
            std::fill(dst, dst + out.shape().plane(), value.size() == 1 ? value[0] : value[c]);
            const T* src = x.plane(b, c);
            for (std::size_t y = 0; y < s.h; ++y) std::copy(src + y * s.w, src + (y + 1) * s.w, dst + (y + pad) * pw + pad);
        }
    return out;
}

template <class T>
BasicTensor<T> crop_planes(const BasicTensor<T>& xpad, std::size_t pad) {
    const Shape s = xpad.shape();
    BasicTensor<T> out({s.n, s.c, s.h - 2 * pad, s.w - 2 * pad});
    const std::size_t w = s.w - 2 * pad;
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c) {
            const T* src = xpad.plane(b, c);
            T* dst = out.plane(b, c);
            for (std::size_t y = 0; y < out.shape().h; ++y)
                std::copy(src + (y + pad) * s.w + pad, src + (y + pad) * s.w + pad + w, dst + y * w);
        }
    return out;
}

template <class T>
BasicTensor<T> conv2d_valid(const BasicTensor<T>& xpad, const BasicTensor<T>& w, std::size_t stride) {
    const Shape in = xpad.shape();
    const Shape ws = w.shape();
    const Geometry g = geometry<T>(in, ws, stride);
    const Polyphase<T> p = split(xpad, stride);
    BasicTensor<T> out({in.n, ws.n, g.oh, g.ow});

    parallel_for(in.n * ws.n, [&](std::size_t begin, std::size_t end) {
        std::vector<T> wide(g.oh * g.wc);
        for (std::size_t task = begin; task < end; ++task) {
            const std::size_t b = task / ws.n;
            const std::size_t o = task % ws.n;
            std::fill(wide.begin(), wide.end(), T(0));
            for (std::size_t c = 0; c < in.c; ++c)
                for (std::size_t u = 0; u < g.k; ++u)
                    for (std::size_t v = 0; v < g.k; ++v)
                        axpy(w.at(o, c, u, v), p.comp(b, c, tap_phase(g, u, v)) + tap_offset(g, u, v), wide.data(), g.span);
            T* dst = out.plane(b, o);
            for (std::size_t i = 0; i < g.oh; ++i)
                std::copy(wide.data() + i * g.wc, wide.data() + i * g.wc + g.ow, dst + i * g.ow);
        }
    });
    return out;
}

template <class T>
void conv2d_valid_backward(const BasicTensor<T>& xpad, const BasicTensor<T>& w, std::size_t stride,
                           const BasicTensor<T>& grad_out, BasicTensor<T>* grad_xpad, BasicTensor<T>* grad_w) {
    const Shape in = xpad.shape();
    const Shape ws = w.shape();
    const Geometry g = geometry<T>(in, ws, stride);
    require_same_shape(grad_out.shape(), Shape{in.n, ws.n, g.oh, g.ow}, "conv2d_valid_backward");

    // Output gradient laid out on the wide grid, zero in the scratch columns.
    std::vector<T> gwide(in.n * ws.n * g.oh * g.wc, T(0));
    for (std::size_t b = 0; b < in.n; ++b)
        for (std::size_t o = 0; o < ws.n; ++o) {
            const T* src = grad_out.plane(b, o);
            T* dst = gwide.data() + (b * ws.n + o) * g.oh * g.wc;
            for (std::size_t i = 0; i < g.oh; ++i) std::copy(src + i * g.ow, src + (i + 1) * g.ow, dst + i * g.wc);
        }
    auto gw_plane = [&](std::size_t b, std::size_t o) { return gwide.data() + (b * ws.n + o) * g.oh * g.wc; };

    if (grad_w != nullptr) {
        const Polyphase<T> p = split(xpad, stride);
        *grad_w = BasicTensor<T>(ws);
        parallel_for(ws.n, [&](std::size_t begin, std::size_t end) {
            for (std::size_t o = begin; o < end; ++o)
                for (std::size_t c = 0; c < in.c; ++c)
                    for (std::size_t u = 0; u < g.k; ++u)
                        for (std::size_t v = 0; v < g.k; ++v) {
                            T acc = T(0);
                            for (std::size_t b = 0; b < in.n; ++b)
                                acc += dot(gw_plane(b, o), p.comp(b, c, tap_phase(g, u, v)) + tap_offset(g, u, v), g.span);
                            grad_w->at(o, c, u, v) = acc;
                        }
        });
    }

    if (grad_xpad != nullptr) {
        Polyphase<T> gp = make_polyphase<T>(in, stride);
        parallel_for(in.n * in.c, [&](std::size_t begin, std::size_t end) {
            for (std::size_t task = begin; task < end; ++task) {
                const std::size_t b = task / in.c;
                const std::size_t c = task % in.c;
                for (std::size_t o = 0; o < ws.n; ++o)
                    for (std::size_t u = 0; u < g.k; ++u)
                        for (std::size_t v = 0; v < g.k; ++v)
                            axpy(w.at(o, c, u, v), gw_plane(b, o), gp.comp(b, c, tap_phase(g, u, v)) + tap_offset(g, u, v), g.span);
            }
        });
        *grad_xpad = BasicTensor<T>(in);
        merge(gp, *grad_xpad);
    }
}

template BasicTensor<float> pad_planes(const BasicTensor<float>&, std::size_t, std::span<const float>);
template BasicTensor<double> pad_planes(const BasicTensor<double>&, std::size_t, std::span<const double>);
template BasicTensor<float> crop_planes(const BasicTensor<float>&, std::size_t);
template BasicTensor<double> crop_planes(const BasicTensor<double>&, std::size_t);
template BasicTensor<float> conv2d_valid(const BasicTensor<float>&, const BasicTensor<float>&, std::size_t);
template BasicTensor<double> conv2d_valid(const BasicTensor<double>&, const BasicTensor<double>&, std::size_t);
template void conv2d_valid_backward(const BasicTensor<float>&, const BasicTensor<float>&, std::size_t,
                                    const BasicTensor<float>&, BasicTensor<float>*, BasicTensor<float>*);
template void conv2d_valid_backward(const BasicTensor<double>&, const BasicTensor<double>&, std::size_t,
                                    const BasicTensor<double>&, BasicTensor<double>*, BasicTensor<double>*);

} // namespace binmoire
