// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "binmoire/engine.hpp"
#include "util.hpp"

namespace binmoire::verify {

using namespace detail;

NetworkConfig gradcheck_network_config() {
    NetworkConfig c;
    c.scales = 2;
    c.channels = {2, 4};
    c.blocks_per_scale = 1;
    c.kernel_size = 3;
    c.io_kernel_size = 1;
    c.io_channels = 3;
    c.use_mabg = true;
    c.use_sgra = true;
    return c;
}

namespace {

using DTensor = BasicTensor<double>;

void randomise(const Network& net, ParamSet<double>& P, Rng& r) {
    for (std::size_t i = 0; i < P.size(); ++i) {
        double lo = -0.5, hi = 0.5;
        switch (net.params[i].role) {
        case ParamRole::ConvWeight: lo = -0.9, hi = 0.9; break;
        case ParamRole::Threshold: lo = -0.3, hi = 0.3; break;
        case ParamRole::ActSlope: lo = 0.8, hi = 2.0; break;
        case ParamRole::RpreluGamma:
        case ParamRole::RpreluZeta: lo = -0.2, hi = 0.2; break;
        case ParamRole::RpreluSlope: lo = 0.1, hi = 0.4; break;
        default: break;
        }
        for (double& v : P[i].data()) v = r.uniform(lo, hi);
    }
}

// Which side of every kink the graph is on: RPReLU pivots, the weight clip
// and sign(w) inside alpha = mean |w|.
std::uint64_t branch_signature(const Network& net, const ParamSet<double>& P, const Tape<double>& tape) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](unsigned v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    for (std::size_t ni = 0; ni < net.graph.size(); ++ni) {
        const Node& node = net.graph[ni];
        if (node.op != NodeOp::Layer) continue;
        const Layer& l = net.layers[node.index];
        if (l.kind != LayerKind::BinaryBlock) continue;
        const DTensor& pre = tape.nodes[ni].pre;
        const Shape s = pre.shape();
        for (std::size_t b = 0; b < s.n; ++b)
            for (std::size_t o = 0; o < s.c; ++o) {
                const double* p = pre.plane(b, o);
                for (std::size_t i = 0; i < s.plane(); ++i) mix(p[i] - P[l.gamma][o] > 0.0 ? 1u : 0u);
            }
        for (double w : P[l.weight].data()) mix((std::abs(w) <= 1.0 ? 2u : 0u) | (w > 0.0 ? 1u : 0u) | (w < 0.0 ? 4u : 0u));
    }
    return h;
}

struct Probe {
    double loss;
    std::uint64_t signature;
};

Probe evaluate(const Network& net, const ParamSet<double>& P, const DTensor& x, const DTensor& R,
               const EngineOptions& opt) {
    Tape<double> tape;
    const DTensor out = forward_train(net, P, x, &tape, opt);
    double l = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) l += R[i] * out[i];
    return {l, branch_signature(net, P, tape)};
}

bool near_threshold_role(ParamRole r) { return r == ParamRole::Threshold || r == ParamRole::ActSlope; }

} // namespace

GradCheckResult gradient_check(const NetworkConfig& cfg, std::uint64_t seed, double tol, double loose_tol) {
    const Network net = build_network(cfg, seed);
    Rng r(mix_seed(seed, 0x67726164ull));
    ParamSet<double> P = cast_params<double>(net.values);
    randomise(net, P, r);

    const std::size_t hw = 4 * net.spatial_multiple();
    const Shape s{2, cfg.io_channels, hw, hw};
    DTensor x(s), R(s);
    for (double& v : x.data()) v = r.uniform(0.0, 1.0);
    for (double& v : R.data()) v = r.uniform(-1.0, 1.0);

    EngineOptions opt;
    opt.mode = BinarizeMode::Surrogate;
    Tape<double> tape;
    (void)forward_train(net, P, x, &tape, opt);
    const std::vector<std::optional<GateDescriptors>> frozen = tape.descriptors();
    opt.frozen_descriptors = &frozen;
    const std::uint64_t base_sig = branch_signature(net, P, tape);
    const ParamSet<double> G = backward(net, P, tape, R);

    GradCheckResult res;
    res.parameters = net.parameter_count();
    const double h = 1e-5;
    for (std::size_t pi = 0; pi < P.size(); ++pi)
        for (std::size_t k = 0; k < P[pi].size(); ++k) {
            const double orig = P[pi][k];
            P[pi][k] = orig + h;
            const Probe plus = evaluate(net, P, x, R, opt);
            P[pi][k] = orig - h;
            const Probe minus = evaluate(net, P, x, R, opt);
            P[pi][k] = orig;
            if (plus.signature != base_sig || minus.signature != base_sig) {
                ++res.excluded;
                continue;
            }
            const double numeric = (plus.loss - minus.loss) / (2.0 * h);
            const double analytic = G[pi][k];
            const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            ++res.checked;
            if (rel > res.max_rel_error) {
                res.max_rel_error = rel;
                res.worst = net.params[pi].name + "[" + std::to_string(k) + "]";
            }
            if (rel < tol) continue;
            if (near_threshold_role(net.params[pi].role) && rel < loose_tol)
                ++res.loose;
            else
                ++res.failures;
        }
    return res;
}

namespace {

void check_network(SuiteReport& rep, std::uint64_t seed) {
    const GradCheckResult g = gradient_check(gradcheck_network_config(), seed);
    const bool ok = g.failures == 0 && g.parameters <= 500 && g.checked > 0 && g.checked + g.excluded == g.parameters;
    add(rep, "network_gradients", ok,
        std::to_string(g.checked) + "/" + std::to_string(g.parameters) + " parameters checked, " +
            std::to_string(g.excluded) + " excluded at kinks, " + std::to_string(g.loose) + " at loose tol, " +
            std::to_string(g.failures) + " failures" + fmt(", max rel %.2e", g.max_rel_error) + " at " + g.worst);
}

void check_act_rule(SuiteReport& rep, Rng& r) {
    const Shape s{2, 3, 4, 5};
    DTensor x(s), g(s);
    for (double& v : x.data()) v = r.uniform(-1.5, 1.5);
    for (double& v : g.data()) v = r.uniform(-1, 1);
    std::vector<double> t{r.uniform(-0.3, 0.3), r.uniform(-0.3, 0.3), r.uniform(-0.3, 0.3)};
    const double slope = r.uniform(0.5, 2.0);
    const ActGrads<double> a = ste_act_backward(g, x, t, slope);

    auto f = [&](const DTensor& xv, const std::vector<double>& tv, double sl) {
        double acc = 0.0;
        for (std::size_t b = 0; b < s.n; ++b)
            for (std::size_t c = 0; c < s.c; ++c)
                for (std::size_t i = 0; i < s.plane(); ++i)
                    acc += g.plane(b, c)[i] * std::tanh(sl * (xv.plane(b, c)[i] + tv[c]));
        return acc;
    };
    const double h = 1e-6;
    double worst = 0.0;
    auto rel = [](double an, double nu) { return std::abs(an - nu) / std::max({std::abs(an), std::abs(nu), 1e-6}); };
    for (std::size_t i = 0; i < x.size(); ++i) {
        DTensor xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        worst = std::max(worst, rel(a.grad_x[i], (f(xp, t, slope) - f(xm, t, slope)) / (2 * h)));
    }
    for (std::size_t c = 0; c < t.size(); ++c) {
        auto tp = t, tm = t;
        tp[c] += h;
        tm[c] -= h;
        worst = std::max(worst, rel(a.grad_t[c], (f(x, tp, slope) - f(x, tm, slope)) / (2 * h)));
    }
    worst = std::max(worst, rel(a.grad_slope, (f(x, t, slope + h) - f(x, t, slope - h)) / (2 * h)));
    add(rep, "activation_rule", worst < 1e-4, fmt("tanh rule vs central differences, max rel %.2e", worst));
}

void check_weight_rule(SuiteReport& rep, Rng& r) {
    const Shape s{4, 3, 3, 3};
    DTensor w(s), g(s);
    for (double& v : w.data()) v = r.uniform(-2, 2);
    w[0] = 1.0;
    w[1] = -1.0;
    for (double& v : g.data()) v = r.uniform(-1, 1);
    const DTensor out = ste_weight_backward(g, w);
    bool ok = true;
    for (std::size_t i = 0; i < w.size(); ++i) ok = ok && out[i] == (std::abs(w[i]) <= 1.0 ? g[i] : 0.0);
    add(rep, "weight_rule", ok, "gradient passes exactly where |w| <= 1");
}

} // namespace

SuiteReport run_grad(std::uint64_t seed) {
    SuiteReport rep{"grad", {}, 0.0};
    Rng r(mix_seed(seed, 0x73746521ull));
    check_act_rule(rep, r);
    check_weight_rule(rep, r);
    check_network(rep, seed);
    return rep;
}

} // namespace binmoire::verify
