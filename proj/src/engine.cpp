// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/engine.hpp"

#include <algorithm>
#include <cmath>

#include "binmoire/float_conv.hpp"
#include "binmoire/sgra.hpp"

namespace binmoire {

template <class T>
std::vector<std::optional<GateDescriptors>> Tape<T>::descriptors() const {
    std::vector<std::optional<GateDescriptors>> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(n.descriptors);
    return out;
}

namespace {

template <class T>
std::span<const T> vec(const BasicTensor<T>& t) {
    return t.data();
}

template <class T>
void add_into(BasicTensor<T>& dst, const BasicTensor<T>& src) {
    require_same_shape(dst.shape(), src.shape(), "add");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <class T>
T sigmoid(T z) {
    return T(1) / (T(1) + std::exp(-z));
}

template <class T>
BasicTensor<T> block_forward_train(const Layer& l, const ParamSet<T>& P, const BasicTensor<T>& x, NodeCache<T>& c,
                                   const EngineOptions& opt, const std::optional<GateDescriptors>* frozen) {
    const BlockConfig& cfg = l.block;
    const ConvSpec& spec = l.conv;
    const Shape s = x.shape();
    const std::size_t cin = spec.in_channels, cout = spec.out_channels;
    const Shape out_shape = cfg.output_shape(s);

    // Gate.
    c.beta.clear();
    c.descriptors.reset();
    if (cfg.use_mabg) {
        c.descriptors = frozen != nullptr && frozen->has_value() ? **frozen : gate_descriptors(x);
        const BasicTensor<T>& gw = P[l.gate_weight];
        const T gb = P[l.gate_bias][0];
        c.beta.resize(s.n * cin);
        for (std::size_t i = 0; i < c.beta.size(); ++i) {
            T z = gb;
            for (std::size_t k = 0; k < kDescriptorCount; ++k) z += gw[k] * static_cast<T>(c.descriptors->rows[i][k]);
            c.beta[i] = sigmoid(z);
        }
    }

    // Binarized activations, padded with logical -1.
    const BasicTensor<T> xin = cfg.upsample ? upsample_nearest2x(x) : x;
    const BasicTensor<T>& t = P[l.threshold];
    const T slope = P[l.act_slope][0];
    c.u = BasicTensor<T>(xin.shape());
    BasicTensor<T> a(xin.shape());
    const std::size_t plane = xin.shape().plane();
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t ch = 0; ch < cin; ++ch) {
            const T* src = xin.plane(b, ch);
            T* u = c.u.plane(b, ch);
            T* dst = a.plane(b, ch);
            for (std::size_t i = 0; i < plane; ++i) {
                u[i] = src[i] + t[ch];
                dst[i] = opt.mode == BinarizeMode::Sign ? (u[i] >= T(0) ? T(1) : T(-1)) : std::tanh(slope * u[i]);
            }
        }
    const T minus_one = T(-1);
    c.apad = pad_planes(a, spec.padding, std::span<const T>(&minus_one, 1));
    c.agate = c.apad;
    if (!c.beta.empty()) {
        const std::size_t pp = c.apad.shape().plane();
        for (std::size_t b = 0; b < s.n; ++b)
            for (std::size_t ch = 0; ch < cin; ++ch) {
                T* p = c.agate.plane(b, ch);
                const T bv = c.beta[b * cin + ch];
                for (std::size_t i = 0; i < pp; ++i) p[i] *= bv;
            }
    }

    // Binarized weights with per-filter scale.
    const BasicTensor<T>& w = P[l.weight];
    const std::size_t n = cin * spec.kernel * spec.kernel;
    c.wbin = BasicTensor<T>(w.shape());
    c.weff = BasicTensor<T>(w.shape());
    c.alpha.assign(cout, T(0));
    for (std::size_t o = 0; o < cout; ++o) {
        T acc = T(0);
        for (std::size_t i = 0; i < n; ++i) {
            const T v = w[o * n + i];
            acc += std::abs(v);
            c.wbin[o * n + i] = opt.mode == BinarizeMode::Sign ? (v >= T(0) ? T(1) : T(-1)) : std::clamp(v, T(-1), T(1));
        }
        c.alpha[o] = acc / static_cast<T>(n);
        for (std::size_t i = 0; i < n; ++i) c.weff[o * n + i] = c.alpha[o] * c.wbin[o * n + i];
    }

    c.pre = conv2d_valid(c.agate, c.weff, spec.stride);
    require_same_shape(c.pre.shape(), out_shape, "block conv");

    // RPReLU.
    const BasicTensor<T>& gamma = P[l.gamma];
    const BasicTensor<T>& zeta = P[l.zeta];
    const BasicTensor<T>& rs = P[l.rslope];
    BasicTensor<T> y(out_shape);
    const std::size_t op = out_shape.plane();
    for (std::size_t b = 0; b < out_shape.n; ++b)
        for (std::size_t o = 0; o < cout; ++o) {
            const T* src = c.pre.plane(b, o);
            T* dst = y.plane(b, o);
            for (std::size_t i = 0; i < op; ++i) {
                const T d = src[i] - gamma[o];
                dst[i] = (d > T(0) ? d : rs[o] * d) + zeta[o];
            }
        }

    // Shortcut.
    if (cfg.shortcut == ShortcutKind::Identity) {
        add_into(y, x);
    } else if (cfg.shortcut == ShortcutKind::Sgra) {
        SgraGeometry g = cfg.sgra;
        c.xr = g.upsample ? upsample_nearest2x(x) : x;
        g.upsample = false;
        add_into(y, interleave(partition_project(c.xr, vec(P[l.sgra_weight]), g), g.groups));
    }
    return y;
}

// Returns the gradient w.r.t. the block input and accumulates parameter
// gradients into G.
template <class T>
BasicTensor<T> block_backward(const Layer& l, const ParamSet<T>& P, const NodeCache<T>& c, const BasicTensor<T>& gy,
                              ParamSet<T>& G) {
    const BlockConfig& cfg = l.block;
    const ConvSpec& spec = l.conv;
    const Shape s = c.x.shape();
    const std::size_t cin = spec.in_channels, cout = spec.out_channels;
    const Shape os = gy.shape();
    BasicTensor<T> gx(s);

    // Shortcut.
    if (cfg.shortcut == ShortcutKind::Identity) {
        add_into(gx, gy);
    } else if (cfg.shortcut == ShortcutKind::Sgra) {
        SgraGeometry g = cfg.sgra;
        g.upsample = false;
        // interleave is a channel permutation; its adjoint is the inverse.
        const InterleavePerm perm(os.c, g.groups);
        BasicTensor<T> gu(os);
        for (std::size_t b = 0; b < os.n; ++b)
            for (std::size_t d = 0; d < os.c; ++d) {
                const T* src = gy.plane(b, d);
                std::copy(src, src + os.plane(), gu.plane(b, perm.source(d)));
            }
        BasicTensor<T> gxr;
        std::vector<T> gw;
        partition_project_backward(c.xr, vec(P[l.sgra_weight]), g, gu, &gxr, &gw);
        for (std::size_t i = 0; i < gw.size(); ++i) G[l.sgra_weight][i] += gw[i];
        add_into(gx, cfg.sgra.upsample ? upsample_nearest2x_backward(gxr) : gxr);
    }

    // RPReLU.
    const BasicTensor<T>& gamma = P[l.gamma];
    const BasicTensor<T>& rs = P[l.rslope];
    BasicTensor<T> gpre(os);
    const std::size_t op = os.plane();
    for (std::size_t b = 0; b < os.n; ++b)
        for (std::size_t o = 0; o < cout; ++o) {
            const T* pre = c.pre.plane(b, o);
            const T* g = gy.plane(b, o);
            T* dst = gpre.plane(b, o);
            T g_gamma = T(0), g_zeta = T(0), g_slope = T(0);
            for (std::size_t i = 0; i < op; ++i) {
                const T d = pre[i] - gamma[o];
                const T k = d > T(0) ? T(1) : rs[o];
                dst[i] = g[i] * k;
                g_gamma -= g[i] * k;
                g_zeta += g[i];
                if (!(d > T(0))) g_slope += g[i] * d;
            }
            G[l.gamma][o] += g_gamma;
            G[l.zeta][o] += g_zeta;
            G[l.rslope][o] += g_slope;
        }

    // Conv.
    BasicTensor<T> g_agate, g_weff;
    conv2d_valid_backward(c.agate, c.weff, spec.stride, gpre, &g_agate, &g_weff);

    // Weights: weff = alpha[o] * wbin, alpha = mean |w|.
    const BasicTensor<T>& w = P[l.weight];
    const std::size_t n = cin * spec.kernel * spec.kernel;
    for (std::size_t o = 0; o < cout; ++o) {
        T g_alpha = T(0);
        for (std::size_t i = 0; i < n; ++i) g_alpha += g_weff[o * n + i] * c.wbin[o * n + i];
        for (std::size_t i = 0; i < n; ++i) {
            const T v = w[o * n + i];
            const T g_wbin = g_weff[o * n + i] * c.alpha[o];
            const T pass = std::abs(v) <= T(1) ? g_wbin : T(0);
            const T sgn = static_cast<T>((v > T(0)) - (v < T(0)));
            G[l.weight][o * n + i] += pass + g_alpha * sgn / static_cast<T>(n);
        }
    }

    // Gate and activations.
    const Shape ps = c.apad.shape();
    BasicTensor<T> g_apad = g_agate;
    if (!c.beta.empty()) {
        const auto& d = c.descriptors->rows;
        for (std::size_t b = 0; b < s.n; ++b)
            for (std::size_t ch = 0; ch < cin; ++ch) {
                const std::size_t bi = b * cin + ch;
                const T* ga = g_agate.plane(b, ch);
                const T* ap = c.apad.plane(b, ch);
                T* dst = g_apad.plane(b, ch);
                T g_beta = T(0);
                for (std::size_t i = 0; i < ps.plane(); ++i) {
                    g_beta += ga[i] * ap[i];
                    dst[i] = ga[i] * c.beta[bi];
                }
                const T g_z = g_beta * c.beta[bi] * (T(1) - c.beta[bi]);
                for (std::size_t k = 0; k < kDescriptorCount; ++k) G[l.gate_weight][k] += g_z * static_cast<T>(d[bi][k]);
                G[l.gate_bias][0] += g_z;
            }
    }
    const BasicTensor<T> g_a = crop_planes(g_apad, spec.padding);
    // The cache holds u = x + t, so evaluate the rule with zero thresholds.
    const ActGrads<T> ag = ste_act_backward(g_a, c.u, std::vector<T>(cin, T(0)), P[l.act_slope][0]);
    for (std::size_t ch = 0; ch < cin; ++ch) G[l.threshold][ch] += ag.grad_t[ch];
    G[l.act_slope][0] += ag.grad_slope;
    add_into(gx, cfg.upsample ? upsample_nearest2x_backward(ag.grad_x) : ag.grad_x);
    return gx;
}

} // namespace

template <class T>
BasicTensor<T> forward_train(const Network& net, const ParamSet<T>& P, const BasicTensor<T>& input, Tape<T>* tape,
                             const EngineOptions& opt) {
    const Shape s = input.shape();
    if (s.c != net.config.io_channels)
        throw DimensionError("forward_train: input has " + std::to_string(s.c) + " channels, expected " +
                             std::to_string(net.config.io_channels));
    const std::size_t m = net.spatial_multiple();
    if (s.h % m != 0 || s.w % m != 0)
        throw DimensionError("forward_train: spatial dims of " + s.str() + " must be multiples of " + std::to_string(m));
    if (P.size() != net.values.size()) throw DimensionError("forward_train: parameter count mismatch");
    if (opt.frozen_descriptors != nullptr && opt.frozen_descriptors->size() != net.graph.size())
        throw DimensionError("forward_train: frozen descriptors must cover every graph node");

    std::vector<NodeCache<T>> local;
    std::vector<NodeCache<T>>& nodes = tape != nullptr ? tape->nodes : local;
    nodes.assign(net.graph.size(), NodeCache<T>{});
    if (tape != nullptr) tape->input = input;

    BasicTensor<T> x = input;
    std::vector<BasicTensor<T>> skips(net.skip_slots);
    for (std::size_t ni = 0; ni < net.graph.size(); ++ni) {
        const Node& node = net.graph[ni];
        NodeCache<T>& c = nodes[ni];
        switch (node.op) {
        case NodeOp::SaveSkip: skips[node.index] = x; break;
        case NodeOp::AddSkip: add_into(x, skips[node.index]); break;
        case NodeOp::Layer: {
            const Layer& l = net.layers[node.index];
            if (tape != nullptr) c.x = x;
            if (l.kind == LayerKind::FullPrecisionConv) {
                const T zero = T(0);
                c.xpad = pad_planes(x, l.conv.padding, std::span<const T>(&zero, 1));
                x = conv2d_valid(c.xpad, P[l.weight], l.conv.stride);
            } else {
                const std::optional<GateDescriptors>* frozen =
                    opt.frozen_descriptors != nullptr ? &(*opt.frozen_descriptors)[ni] : nullptr;
                x = block_forward_train(l, P, x, c, opt, frozen);
            }
            if (tape == nullptr) c = NodeCache<T>{};
            break;
        }
        }
    }
    require_same_shape(x.shape(), s, "network output");
    add_into(x, input);
    return x;
}

template <class T>
ParamSet<T> backward(const Network& net, const ParamSet<T>& P, const Tape<T>& tape, const BasicTensor<T>& grad_out) {
    if (tape.nodes.size() != net.graph.size()) throw DimensionError("backward: tape does not match the network");
    ParamSet<T> G = zeros_like(P);
    BasicTensor<T> g = grad_out;
    std::vector<BasicTensor<T>> skip_grads(net.skip_slots);
    for (std::size_t ni = net.graph.size(); ni-- > 0;) {
        const Node& node = net.graph[ni];
        const NodeCache<T>& c = tape.nodes[ni];
        switch (node.op) {
        case NodeOp::AddSkip: skip_grads[node.index] = g; break;
        case NodeOp::SaveSkip: add_into(g, skip_grads[node.index]); break;
        case NodeOp::Layer: {
            const Layer& l = net.layers[node.index];
            if (l.kind == LayerKind::FullPrecisionConv) {
                BasicTensor<T> gxpad, gw;
                conv2d_valid_backward(c.xpad, P[l.weight], l.conv.stride, g, &gxpad, &gw);
                add_into(G[l.weight], gw);
                g = crop_planes(gxpad, l.conv.padding);
            } else {
                g = block_backward(l, P, c, g, G);
            }
            break;
        }
        }
    }
    return G;
}

template <class T>
ActGrads<T> ste_act_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& x, const std::vector<T>& t, T slope) {
    require_same_shape(grad_out.shape(), x.shape(), "ste_act_backward");
    const Shape s = x.shape();
    if (t.size() != s.c)
        throw DimensionError("ste_act_backward: threshold length " + std::to_string(t.size()) + " != channels " +
                             std::to_string(s.c));
    ActGrads<T> r{BasicTensor<T>(s), std::vector<T>(s.c, T(0)), T(0)};
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t ch = 0; ch < s.c; ++ch) {
            const T* xv = x.plane(b, ch);
            const T* g = grad_out.plane(b, ch);
            T* dst = r.grad_x.plane(b, ch);
            for (std::size_t i = 0; i < s.plane(); ++i) {
                const T u = xv[i] + t[ch];
                const T th = std::tanh(slope * u);
                const T sech2 = T(1) - th * th;
                dst[i] = g[i] * slope * sech2;
                r.grad_t[ch] += dst[i];
                r.grad_slope += g[i] * u * sech2;
            }
        }
    return r;
}

template <class T>
BasicTensor<T> ste_weight_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& w) {
    require_same_shape(grad_out.shape(), w.shape(), "ste_weight_backward");
    BasicTensor<T> out(w.shape());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::abs(w[i]) <= T(1) ? grad_out[i] : T(0);
    return out;
}

template <class T>
T l1_loss(const BasicTensor<T>& a, const BasicTensor<T>& b, BasicTensor<T>* grad_a) {
    require_same_shape(a.shape(), b.shape(), "l1_loss");
    const T n = static_cast<T>(a.size());
    double acc = 0.0;
    if (grad_a != nullptr) *grad_a = BasicTensor<T>(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const T d = a[i] - b[i];
        acc += std::abs(static_cast<double>(d));
        if (grad_a != nullptr) (*grad_a)[i] = static_cast<T>((d > T(0)) - (d < T(0))) / n;
    }
    return static_cast<T>(acc / static_cast<double>(a.size()));
}

#define BINMOIRE_ENGINE_INSTANTIATE(T)                                                                              \
    template struct Tape<T>;                                                                                        \
    template BasicTensor<T> forward_train(const Network&, const ParamSet<T>&, const BasicTensor<T>&, Tape<T>*,      \
                                          const EngineOptions&);                                                    \
    template ParamSet<T> backward(const Network&, const ParamSet<T>&, const Tape<T>&, const BasicTensor<T>&);       \
    template ActGrads<T> ste_act_backward(const BasicTensor<T>&, const BasicTensor<T>&, const std::vector<T>&, T);  \
    template BasicTensor<T> ste_weight_backward(const BasicTensor<T>&, const BasicTensor<T>&);                      \
    template T l1_loss(const BasicTensor<T>&, const BasicTensor<T>&, BasicTensor<T>*);

BINMOIRE_ENGINE_INSTANTIATE(float)
BINMOIRE_ENGINE_INSTANTIATE(double)

#undef BINMOIRE_ENGINE_INSTANTIATE

} // namespace binmoire
