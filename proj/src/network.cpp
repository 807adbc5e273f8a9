// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "binmoire/float_conv.hpp"
#include "binmoire/rng.hpp"

namespace binmoire {

std::size_t NetworkConfig::level_channels(std::size_t level) const {
    if (!channels.empty()) return channels.at(level);
    return base_channels << level;
}

void NetworkConfig::validate() const {
    if (scales == 0 || scales > 6) throw ConfigError("network: scales must be in [1, 6]");
    if (!channels.empty() && channels.size() != scales)
        throw ConfigError("network: channels lists " + std::to_string(channels.size()) + " widths for " +
                          std::to_string(scales) + " scales");
    for (std::size_t l = 0; l < scales; ++l)
        if (level_channels(l) == 0) throw ConfigError("network: channel widths must be >= 1");
    if (channels.empty() && base_channels == 0) throw ConfigError("network: base_channels must be >= 1");
    if (kernel_size == 0 || kernel_size % 2 == 0) throw ConfigError("network: kernel_size must be odd");
    if (io_kernel_size == 0 || io_kernel_size % 2 == 0) throw ConfigError("network: io_kernel_size must be odd");
    if (io_channels == 0) throw ConfigError("network: io_channels must be >= 1");
    if (scales == 1 && blocks_per_scale == 0)
        throw ConfigError("network: a single-scale network needs at least one block");
    if (use_sgra)
        for (std::size_t l = 0; l + 1 < scales; ++l) (void)choose_groups(level_channels(l), level_channels(l + 1), group_divisor);
}

Shape BlockConfig::output_shape(const Shape& in) const {
    const Shape conv_in = upsample ? Shape{in.n, in.c, in.h * 2, in.w * 2} : in;
    return conv.output_shape(conv_in);
}

FloatTensor block_forward(const FloatTensor& x, const BlockConfig& cfg, const BlockParams& params) {
    const Shape out_shape = cfg.output_shape(x.shape());
    const GateVector beta = cfg.use_mabg && params.gate.has_value()
                                ? predict_gate(x, *params.gate)
                                : GateVector::uniform(x.shape().n, x.shape().c, 1.0f);
    const FloatTensor conv_in = cfg.upsample ? upsample_nearest2x(x) : x;
    FloatTensor y = rprelu(gated_binary_conv(conv_in, params.weight, params.threshold, beta, cfg.conv), params.rprelu);
    if (cfg.shortcut == ShortcutKind::None) return y;
    const FloatTensor sc = sgra_forward(x, params.shortcut, out_shape);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += sc[i];
    return y;
}

const char* role_name(ParamRole r) {
    switch (r) {
    case ParamRole::ConvWeight: return "conv_weight";
    case ParamRole::Threshold: return "threshold";
    case ParamRole::ActSlope: return "act_slope";
    case ParamRole::RpreluGamma: return "rprelu_gamma";
    case ParamRole::RpreluZeta: return "rprelu_zeta";
    case ParamRole::RpreluSlope: return "rprelu_slope";
    case ParamRole::GateWeight: return "gate_weight";
    case ParamRole::GateBias: return "gate_bias";
    case ParamRole::SgraWeight: return "sgra_weight";
    }
    return "unknown";
}

std::optional<ParamRole> role_from_name(const std::string& s) {
    for (ParamRole r : {ParamRole::ConvWeight, ParamRole::Threshold, ParamRole::ActSlope, ParamRole::RpreluGamma,
                        ParamRole::RpreluZeta, ParamRole::RpreluSlope, ParamRole::GateWeight, ParamRole::GateBias,
                        ParamRole::SgraWeight})
        if (s == role_name(r)) return r;
    return std::nullopt;
}

std::size_t Network::find_param(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i].name == name) return i;
    return kNoParam;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& v : values) n += v.size();
    return n;
}

std::uint64_t Network::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& v : values) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(v.raw());
        for (std::size_t i = 0; i < v.size() * sizeof(float); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

namespace {

std::vector<float> as_vector(const FloatTensor& t) { return {t.data().begin(), t.data().end()}; }

} // namespace

BlockParams Network::block_params(std::size_t li) const {
    const Layer& l = layers.at(li);
    if (l.kind != LayerKind::BinaryBlock) throw ConfigError("block_params: layer " + l.name + " is not a binary block");
    BlockParams p;
    p.weight = values[l.weight];
    p.threshold = {as_vector(values[l.threshold])};
    p.rprelu = {as_vector(values[l.gamma]), as_vector(values[l.zeta]), as_vector(values[l.rslope])};
    if (l.gate_weight != kNoParam) {
        GateHead head;
        for (std::size_t k = 0; k < kDescriptorCount; ++k) head.weight[k] = values[l.gate_weight][k];
        head.bias = values[l.gate_bias][0];
        p.gate = head;
    }
    if (l.block.shortcut == ShortcutKind::Sgra) {
        p.shortcut.identity = false;
        p.shortcut.geometry = l.block.sgra;
        p.shortcut.weights = as_vector(values[l.sgra_weight]);
    }
    return p;
}

template <class T>
BasicTensor<T> fp_conv(const BasicTensor<T>& x, const BasicTensor<T>& w, const ConvSpec& spec) {
    (void)spec.output_shape(x.shape());
    require_same_shape(w.shape(), spec.weight_shape(), "fp_conv weights");
    const T zero = T(0);
    const BasicTensor<T> xp = pad_planes(x, spec.padding, std::span<const T>(&zero, 1));
    return conv2d_valid(xp, w, spec.stride);
}

template BasicTensor<float> fp_conv(const BasicTensor<float>&, const BasicTensor<float>&, const ConvSpec&);
template BasicTensor<double> fp_conv(const BasicTensor<double>&, const BasicTensor<double>&, const ConvSpec&);

FloatTensor pad_to_multiple(const FloatTensor& x, std::size_t m) {
    const Shape s = x.shape();
    const Shape ps{s.n, s.c, (s.h + m - 1) / m * m, (s.w + m - 1) / m * m};
    if (ps == s) return x;
    FloatTensor out(ps);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t y = 0; y < ps.h; ++y)
                for (std::size_t xx = 0; xx < ps.w; ++xx)
                    out.at(b, c, y, xx) = x.at(b, c, std::min(y, s.h - 1), std::min(xx, s.w - 1));
    return out;
}

FloatTensor crop_spatial(const FloatTensor& x, std::size_t h, std::size_t w) {
    const Shape s = x.shape();
    if (h > s.h || w > s.w) throw DimensionError("crop_spatial: crop larger than " + s.str());
    if (h == s.h && w == s.w) return x;
    FloatTensor out({s.n, s.c, h, w});
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t xx = 0; xx < w; ++xx) out.at(b, c, y, xx) = x.at(b, c, y, xx);
    return out;
}

FloatTensor Network::infer(const FloatTensor& input) const {
    const Shape s = input.shape();
    if (s.c != config.io_channels)
        throw DimensionError("network: input has " + std::to_string(s.c) + " channels, expected " +
                             std::to_string(config.io_channels));
    const FloatTensor x0 = pad_to_multiple(input, spatial_multiple());
    FloatTensor x = x0;
    std::vector<FloatTensor> skips(skip_slots);
    for (const Node& node : graph) {
        switch (node.op) {
        case NodeOp::SaveSkip: skips[node.index] = x; break;
        case NodeOp::AddSkip: {
            const FloatTensor& sk = skips[node.index];
            require_same_shape(sk.shape(), x.shape(), "skip connection");
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += sk[i];
            break;
        }
        case NodeOp::Layer: {
            const Layer& l = layers[node.index];
            if (l.kind == LayerKind::FullPrecisionConv)
                x = fp_conv(x, values[l.weight], l.conv);
            else
                x = block_forward(x, l.block, block_params(node.index));
            break;
        }
        }
    }
    require_same_shape(x.shape(), x0.shape(), "network output");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += x0[i];
    return crop_spatial(x, s.h, s.w);
}

namespace {

std::uint64_t name_seed(std::uint64_t seed, const std::string& name) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return mix_seed(seed, h);
}

class Builder {
public:
    Builder(const NetworkConfig& cfg, std::uint64_t seed) : seed_(seed) { net_.config = cfg; }

    void full_precision(const std::string& name, std::size_t cin, std::size_t cout, double scale) {
        Layer l;
        l.name = name;
        l.kind = LayerKind::FullPrecisionConv;
        const std::size_t k = net_.config.io_kernel_size;
        l.conv = {cin, cout, k, 1, k / 2};
        const double fan_in = static_cast<double>(cin * k * k);
        l.weight = add_uniform(name, "weight", ParamRole::ConvWeight, l.conv.weight_shape(), scale / std::sqrt(fan_in),
                               false, false);
        push(std::move(l));
    }

    void block(const std::string& name, std::size_t cin, std::size_t cout, std::size_t stride, bool upsample) {
        const NetworkConfig& cfg = net_.config;
        Layer l;
        l.name = name;
        l.kind = LayerKind::BinaryBlock;
        const std::size_t k = cfg.kernel_size;
        l.conv = {cin, cout, k, stride, k / 2};
        BlockConfig& b = l.block;
        b.conv = l.conv;
        b.upsample = upsample;
        b.use_mabg = cfg.use_mabg &&
                     std::find(cfg.mabg_disabled.begin(), cfg.mabg_disabled.end(), name) == cfg.mabg_disabled.end();
        const bool reshapes = cin != cout || stride != 1 || upsample;
        if (!reshapes)
            b.shortcut = ShortcutKind::Identity;
        else if (cfg.use_sgra)
            b.shortcut = ShortcutKind::Sgra;
        else
            b.shortcut = ShortcutKind::None;

        const bool mabg = b.use_mabg;
        const double fan_in = static_cast<double>(cin * k * k);
        l.weight = add_uniform(name, "weight", ParamRole::ConvWeight, l.conv.weight_shape(), 1.0 / std::sqrt(fan_in),
                               true, mabg);
        l.threshold = add_const(name, "threshold", ParamRole::Threshold, cin, 0.0f, mabg);
        l.act_slope = add_const(name, "act_slope", ParamRole::ActSlope, 1, 1.0f, mabg);
        l.gamma = add_const(name, "rprelu_gamma", ParamRole::RpreluGamma, cout, 0.0f, mabg);
        l.zeta = add_const(name, "rprelu_zeta", ParamRole::RpreluZeta, cout, 0.0f, mabg);
        l.rslope = add_const(name, "rprelu_slope", ParamRole::RpreluSlope, cout, 0.25f, mabg);
        if (mabg) {
            l.gate_weight = add_const(name, "gate_weight", ParamRole::GateWeight, kDescriptorCount, 0.0f, mabg);
            l.gate_bias = add_const(name, "gate_bias", ParamRole::GateBias, 1, 0.0f, mabg);
        }
        if (b.shortcut == ShortcutKind::Sgra) {
            b.sgra = {cin, cout, choose_groups(cin, cout, cfg.group_divisor), stride, upsample};
            b.sgra.validate();
            const SgraParams init = SgraParams::init(b.sgra, name_seed(seed_, name + ".sgra_weight"));
            l.sgra_weight = add(name, "sgra_weight", ParamRole::SgraWeight, FloatTensor({1, 1, 1, init.weights.size()}, init.weights), false, mabg);
        }
        push(std::move(l));
    }

    void save_skip(std::size_t slot) {
        net_.graph.push_back({NodeOp::SaveSkip, slot});
        net_.skip_slots = std::max(net_.skip_slots, slot + 1);
    }
    void add_skip(std::size_t slot) { net_.graph.push_back({NodeOp::AddSkip, slot}); }

    Network finish() { return std::move(net_); }

private:
    void push(Layer l) {
        net_.graph.push_back({NodeOp::Layer, net_.layers.size()});
        net_.layers.push_back(std::move(l));
    }

    std::size_t add(const std::string& layer, const char* suffix, ParamRole role, FloatTensor value, bool binarized,
                    bool mabg) {
        net_.params.push_back({layer + "." + suffix, layer, role, binarized, mabg});
        net_.values.push_back(std::move(value));
        return net_.values.size() - 1;
    }

    std::size_t add_uniform(const std::string& layer, const char* suffix, ParamRole role, Shape shape, double bound,
                            bool binarized, bool mabg) {
        FloatTensor t(shape);
        Rng rng(name_seed(seed_, layer + "." + suffix));
        for (float& v : t.data()) v = static_cast<float>(rng.uniform(-bound, bound));
        return add(layer, suffix, role, std::move(t), binarized, mabg);
    }

    std::size_t add_const(const std::string& layer, const char* suffix, ParamRole role, std::size_t count, float v,
                          bool mabg) {
        const Shape shape{1, count, 1, 1};
        return add(layer, suffix, role, FloatTensor(shape, v), false, mabg);
    }

    Network net_;
    std::uint64_t seed_;
};

} // namespace

Network build_network(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Builder b(cfg, seed);
    const std::size_t S = cfg.scales;
    // Head: He-style bound so the first binarized layer sees unit-scale inputs.
    b.full_precision("head", cfg.io_channels, cfg.level_channels(0), std::sqrt(6.0));
    for (std::size_t l = 0; l < S; ++l) {
        const std::size_t c = cfg.level_channels(l);
        for (std::size_t k = 0; k < cfg.blocks_per_scale; ++k)
            b.block("enc" + std::to_string(l) + ".b" + std::to_string(k), c, c, 1, false);
        if (l + 1 < S) {
            b.save_skip(l);
            b.block("down" + std::to_string(l), c, cfg.level_channels(l + 1), 2, false);
        }
    }
    for (std::size_t l = S - 1; l-- > 0;) {
        b.block("up" + std::to_string(l), cfg.level_channels(l + 1), cfg.level_channels(l), 1, true);
        b.add_skip(l);
    }
    // Tail starts near zero so the untrained network is close to identity.
    b.full_precision("tail", cfg.level_channels(0), cfg.io_channels, 0.1);
    return b.finish();
}

} // namespace binmoire
