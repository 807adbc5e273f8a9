// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/cost.hpp"

#include <cstdio>

#include "nlohmann/json.hpp"

namespace binmoire {

double CostReport::params_b() const {
    double s = 0.0;
    for (const auto& r : rows)
        if (r.binarized) s += r.params_b;
    return s;
}

double CostReport::params_f() const {
    double s = 0.0;
    for (const auto& r : rows)
        if (!r.binarized) s += static_cast<double>(r.params_f);
    return s;
}

double CostReport::ops_b() const {
    double s = 0.0;
    for (const auto& r : rows)
        if (r.binarized) s += r.ops_b;
    return s;
}

double CostReport::ops_f() const {
    double s = 0.0;
    for (const auto& r : rows)
        if (!r.binarized) s += static_cast<double>(r.ops_f);
    return s;
}

std::string CostReport::table() const {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %4s %12s %12s %16s %16s\n", "layer", "bin", "params_f", "params_b",
                  "ops_f", "ops_b");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-18s %4s %12llu %12.4f %16llu %16.4f\n", r.name.c_str(),
                      r.binarized ? "yes" : "no", static_cast<unsigned long long>(r.params_f), r.params_b,
                      static_cast<unsigned long long>(r.ops_f), r.ops_b);
        out += line;
    }
    std::snprintf(line, sizeof line, "input %zux%zu  Params = %.4f (b %.4f + f %.0f)  OPs = %.4f (b %.4f + f %.0f)\n",
                  input_h, input_w, params(), params_b(), params_f(), ops(), ops_b(), ops_f());
    out += line;
    return out;
}

std::string CostReport::records() const {
    std::string out;
    for (const auto& r : rows) {
        nlohmann::json j{{"name", r.name},     {"binarized", r.binarized}, {"params_f", r.params_f},
                         {"params_b", r.params_b}, {"ops_f", r.ops_f},         {"ops_b", r.ops_b}};
        out += j.dump() + "\n";
    }
    nlohmann::json t{{"total", {{"params", params()},
                                {"params_b", params_b()},
                                {"params_f", params_f()},
                                {"ops", ops()},
                                {"ops_b", ops_b()},
                                {"ops_f", ops_f()},
                                {"input_h", input_h},
                                {"input_w", input_w}}}};
    out += t.dump() + "\n";
    return out;
}

CostRow conv_cost(const std::string& name, const ConvSpec& spec, std::size_t out_h, std::size_t out_w, bool binarized) {
    CostRow r;
    r.name = name;
    r.binarized = binarized;
    r.params_f = static_cast<std::uint64_t>(spec.out_channels) * spec.in_channels * spec.kernel * spec.kernel;
    r.ops_f = r.params_f * out_h * out_w;
    if (binarized) {
        r.params_b = static_cast<double>(r.params_f) / 32.0;
        r.ops_b = static_cast<double>(r.ops_f) / 64.0;
    }
    return r;
}

namespace {

CostRow fp_row(std::string name, std::uint64_t params, std::uint64_t ops) {
    CostRow r;
    r.name = std::move(name);
    r.params_f = params;
    r.ops_f = ops;
    return r;
}

} // namespace

CostReport count_params_ops(const Network& net, std::size_t input_h, std::size_t input_w) {
    if (input_h == 0 || input_w == 0) throw ConfigError("count: input dims must be positive");
    const std::size_t m = net.spatial_multiple();
    CostReport rep;
    rep.input_h = input_h;
    rep.input_w = input_w;
    Shape s{1, net.config.io_channels, (input_h + m - 1) / m * m, (input_w + m - 1) / m * m};
    std::vector<Shape> skips(net.skip_slots);
    for (const Node& node : net.graph) {
        if (node.op == NodeOp::SaveSkip) {
            skips[node.index] = s;
            continue;
        }
        if (node.op == NodeOp::AddSkip) {
            // One add per element of the merged tensor.
            rep.rows.push_back(fp_row("skip" + std::to_string(node.index) + ".add", 0, s.c * s.plane()));
            continue;
        }
        const Layer& l = net.layers[node.index];
        if (l.kind == LayerKind::FullPrecisionConv) {
            const Shape o = l.conv.output_shape(s);
            rep.rows.push_back(conv_cost(l.name, l.conv, o.h, o.w, false));
            s = o;
            continue;
        }
        const BlockConfig& b = l.block;
        const Shape o = b.output_shape(s);
        const std::uint64_t in_elems = s.c * s.plane();
        const std::uint64_t conv_in_elems = b.upsample ? in_elems * 4 : in_elems;
        const std::uint64_t out_elems = o.c * o.plane();
        rep.rows.push_back(conv_cost(l.name + ".conv", l.conv, o.h, o.w, true));
        // threshold add, alpha scale, RPReLU (shift, slope, shift), residual add
        const std::uint64_t aux_params = l.conv.in_channels + 4 * l.conv.out_channels;
        const std::uint64_t aux_ops =
            conv_in_elems + out_elems + 3 * out_elems + (b.shortcut == ShortcutKind::None ? 0 : out_elems);
        rep.rows.push_back(fp_row(l.name + ".aux", aux_params, aux_ops));
        if (b.use_mabg)
            rep.rows.push_back(fp_row(l.name + ".mabg", kDescriptorCount + 1,
                                      8 * in_elems + in_elems + kDescriptorCount * s.c));
        if (b.shortcut == ShortcutKind::Sgra) {
            const SgraGeometry& g = b.sgra;
            rep.rows.push_back(fp_row(l.name + ".sgra", g.weight_count(),
                                      static_cast<std::uint64_t>(g.out_channels) * g.c_in() * o.plane()));
        }
        s = o;
    }
    // Global residual.
    rep.rows.push_back(fp_row("residual.add", 0, s.c * s.plane()));
    return rep;
}

} // namespace binmoire
