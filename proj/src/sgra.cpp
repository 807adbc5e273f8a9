// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/sgra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlohmann/json.hpp"

#include "binmoire/rng.hpp"

namespace binmoire {

std::size_t choose_groups(std::size_t in_channels, std::size_t out_channels, std::size_t divisor) {
    if (in_channels == 0 || out_channels == 0) throw ConfigError("choose_groups: channel counts must be >= 1");
    const std::size_t g = std::gcd(in_channels, out_channels);
    if (divisor == 0 || g % divisor != 0)
        throw ConfigError("choose_groups: divisor " + std::to_string(divisor) + " does not divide gcd(" +
                          std::to_string(in_channels) + ", " + std::to_string(out_channels) + ") = " +
                          std::to_string(g));
    return g / divisor;
}

InterleavePerm::InterleavePerm(std::size_t channels, std::size_t g) : groups(g) {
    if (g == 0 || channels % g != 0)
        throw DimensionError("interleave: " + std::to_string(channels) + " channels not divisible by " +
                             std::to_string(g) + " groups");
    per_group = channels / g;
}

std::vector<std::size_t> InterleavePerm::sources() const {
    std::vector<std::size_t> s(channels());
    for (std::size_t d = 0; d < s.size(); ++d) s[d] = source(d);
    return s;
}

void SgraGeometry::validate() const {
    if (groups == 0 || in_channels % groups != 0 || out_channels % groups != 0)
        throw DimensionError("sgra: " + std::to_string(groups) + " groups must divide C_in=" +
                             std::to_string(in_channels) + " and C_out=" + std::to_string(out_channels));
    if (stride == 0) throw ConfigError("sgra: stride must be >= 1");
}

Shape SgraGeometry::output_shape(const Shape& in) const {
    validate();
    if (in.c != in_channels)
        throw DimensionError("sgra: input has " + std::to_string(in.c) + " channels, expected " +
                             std::to_string(in_channels));
    const std::size_t h = upsample ? in.h * 2 : in.h;
    const std::size_t w = upsample ? in.w * 2 : in.w;
    return {in.n, out_channels, (h + stride - 1) / stride, (w + stride - 1) / stride};
}

SgraParams SgraParams::init(const SgraGeometry& g, std::uint64_t seed) {
    g.validate();
    SgraParams p{false, g, std::vector<float>(g.weight_count())};
    Rng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(g.c_in()));
    for (float& w : p.weights) w = static_cast<float>(rng.uniform(-bound, bound));
    return p;
}

template <class T>
BasicTensor<T> upsample_nearest2x(const BasicTensor<T>& x) {
    const Shape s = x.shape();
    BasicTensor<T> out({s.n, s.c, s.h * 2, s.w * 2});
    for (std::size_t p = 0; p < s.n * s.c; ++p) {
        const T* src = x.raw() + p * s.plane();
        T* dst = out.raw() + p * s.plane() * 4;
        for (std::size_t y = 0; y < 2 * s.h; ++y)
            for (std::size_t xx = 0; xx < 2 * s.w; ++xx) dst[y * 2 * s.w + xx] = src[(y / 2) * s.w + xx / 2];
    }
    return out;
}

template <class T>
BasicTensor<T> upsample_nearest2x_backward(const BasicTensor<T>& grad) {
    const Shape s = grad.shape();
    if (s.h % 2 != 0 || s.w % 2 != 0) throw DimensionError("upsample backward: odd gradient dims " + s.str());
    BasicTensor<T> out({s.n, s.c, s.h / 2, s.w / 2});
    for (std::size_t p = 0; p < s.n * s.c; ++p) {
        const T* src = grad.raw() + p * s.plane();
        T* dst = out.raw() + p * s.plane() / 4;
        for (std::size_t y = 0; y < s.h; ++y)
            for (std::size_t xx = 0; xx < s.w; ++xx) dst[(y / 2) * (s.w / 2) + xx / 2] += src[y * s.w + xx];
    }
    return out;
}

template <class T>
BasicTensor<T> partition_project(const BasicTensor<T>& x_in, std::span<const T> weights, const SgraGeometry& g) {
    const Shape out_shape = g.output_shape(x_in.shape());
    if (weights.size() != g.weight_count())
        throw DimensionError("sgra: expected " + std::to_string(g.weight_count()) + " weights, got " +
                             std::to_string(weights.size()));
    const BasicTensor<T> up = g.upsample ? upsample_nearest2x(x_in) : BasicTensor<T>();
    const BasicTensor<T>& x = g.upsample ? up : x_in;
    const Shape s = x.shape();
    const std::size_t ci = g.c_in(), co = g.c_out(), st = g.stride;
    BasicTensor<T> u(out_shape);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t k = 0; k < g.groups; ++k)
            for (std::size_t r = 0; r < co; ++r) {
                T* dst = u.plane(b, k * co + r);
                for (std::size_t q = 0; q < ci; ++q) {
                    const T w = weights[(k * co + r) * ci + q];
                    const T* src = x.plane(b, k * ci + q);
                    for (std::size_t i = 0; i < out_shape.h; ++i)
                        for (std::size_t j = 0; j < out_shape.w; ++j)
                            dst[i * out_shape.w + j] += w * src[(st * i) * s.w + st * j];
                }
            }
    return u;
}

template <class T>
void partition_project_backward(const BasicTensor<T>& x, std::span<const T> weights, const SgraGeometry& g,
                                const BasicTensor<T>& grad_u, BasicTensor<T>* grad_x, std::vector<T>* grad_w) {
    const Shape s = x.shape();
    const Shape os = grad_u.shape();
    const std::size_t ci = g.c_in(), co = g.c_out(), st = g.stride;
    if (grad_x != nullptr) *grad_x = BasicTensor<T>(s);
    if (grad_w != nullptr) grad_w->assign(g.weight_count(), T(0));
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t k = 0; k < g.groups; ++k)
            for (std::size_t r = 0; r < co; ++r) {
                const T* gu = grad_u.plane(b, k * co + r);
                for (std::size_t q = 0; q < ci; ++q) {
                    const std::size_t wi = (k * co + r) * ci + q;
                    const T* src = x.plane(b, k * ci + q);
                    T acc = T(0);
                    T* gx = grad_x != nullptr ? grad_x->plane(b, k * ci + q) : nullptr;
                    for (std::size_t i = 0; i < os.h; ++i)
                        for (std::size_t j = 0; j < os.w; ++j) {
                            const std::size_t xi = (st * i) * s.w + st * j;
                            const T gv = gu[i * os.w + j];
                            acc += gv * src[xi];
                            if (gx != nullptr) gx[xi] += gv * weights[wi];
                        }
                    if (grad_w != nullptr) (*grad_w)[wi] += acc;
                }
            }
}

template <class T>
BasicTensor<T> interleave(const BasicTensor<T>& u, std::size_t groups) {
    const Shape s = u.shape();
    const InterleavePerm perm(s.c, groups);
    BasicTensor<T> y(s);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t d = 0; d < s.c; ++d) {
            const T* src = u.plane(b, perm.source(d));
            std::copy(src, src + s.plane(), y.plane(b, d));
        }
    return y;
}

FloatTensor partition_project(const FloatTensor& x, const SgraParams& p) {
    if (p.identity) throw ConfigError("partition_project: identity shortcut has no projection");
    return partition_project<float>(x, std::span<const float>(p.weights), p.geometry);
}

FloatTensor sgra_forward(const FloatTensor& x, const SgraParams& p, const Shape& target) {
    if (p.identity) {
        if (x.shape() != target)
            throw ConfigError("sgra_forward: identity shortcut cannot map " + x.shape().str() + " to " + target.str());
        return x;
    }
    const Shape out = p.geometry.output_shape(x.shape());
    if (out != target)
        throw ConfigError("sgra_forward: adapter produces " + out.str() + ", target is " + target.str());
    return interleave(partition_project(x, p), p.geometry.groups);
}

DistributionReport group_distribution_report(const FloatTensor& u_before, const FloatTensor& y_after,
                                             std::size_t groups, std::size_t bins) {
    if (bins < 2) throw ConfigError("group_distribution_report: need at least 2 bins");
    require_same_shape(u_before.shape(), y_after.shape(), "group_distribution_report");
    const Shape s = u_before.shape();
    const InterleavePerm perm(s.c, groups);
    const std::size_t m = perm.per_group;

    double lo = u_before[0], hi = u_before[0];
    for (float v : u_before.data()) lo = std::min<double>(lo, v), hi = std::max<double>(hi, v);
    for (float v : y_after.data()) lo = std::min<double>(lo, v), hi = std::max<double>(hi, v);
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);

    auto bin_of = [&](double v) -> std::size_t {
        if (hi == lo) return 0;
        const auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        return std::min(i, bins - 1);
    };
    auto histograms = [&](const FloatTensor& t) {
        std::vector<GroupHistogram> out(groups);
        for (std::size_t k = 0; k < groups; ++k) {
            out[k].group = k;
            out[k].bin_edges = edges;
            out[k].counts.assign(bins, 0);
            for (std::size_t b = 0; b < s.n; ++b)
                for (std::size_t c = k * m; c < (k + 1) * m; ++c) {
                    const float* p = t.plane(b, c);
                    for (std::size_t i = 0; i < s.plane(); ++i) ++out[k].counts[bin_of(p[i])];
                }
        }
        return out;
    };
    return {histograms(u_before), histograms(y_after)};
}

std::string to_records(const DistributionReport& r) {
    std::string out;
    auto emit = [&](const char* stage, const std::vector<GroupHistogram>& hs) {
        for (const auto& h : hs) {
            nlohmann::json j{{"stage", stage}, {"group", h.group}, {"bin_edges", h.bin_edges}, {"counts", h.counts}};
            out += j.dump() + "\n";
        }
    };
    emit("before", r.before);
    emit("after", r.after);
    return out;
}

#define BINMOIRE_SGRA_INSTANTIATE(T)                                                                          \
    template BasicTensor<T> upsample_nearest2x(const BasicTensor<T>&);                                        \
    template BasicTensor<T> upsample_nearest2x_backward(const BasicTensor<T>&);                               \
    template BasicTensor<T> partition_project(const BasicTensor<T>&, std::span<const T>, const SgraGeometry&); \
    template void partition_project_backward(const BasicTensor<T>&, std::span<const T>, const SgraGeometry&,  \
                                             const BasicTensor<T>&, BasicTensor<T>*, std::vector<T>*);        \
    template BasicTensor<T> interleave(const BasicTensor<T>&, std::size_t);

BINMOIRE_SGRA_INSTANTIATE(float)
BINMOIRE_SGRA_INSTANTIATE(double)

#undef BINMOIRE_SGRA_INSTANTIATE

} // namespace binmoire
