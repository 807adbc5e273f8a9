// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>

#include "binmoire/binarize.hpp"
#include "binmoire/binconv.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "binmoire/parallel.hpp"
#include "binmoire/simd/kernels.hpp"
#include "util.hpp"

namespace binmoire::verify {

using namespace detail;

namespace {

struct ConvCase {
    ConvSpec spec;
    Shape in;
};

ConvCase random_conv_case(Rng& r, std::size_t max_cin, std::size_t max_cout, std::size_t max_k, std::size_t max_hw) {
    static const std::size_t kernels[] = {1, 2, 3, 5, 7};
    std::size_t k = 0;
    do k = kernels[r.integer(0, 4)];
    while (k > max_k);
    ConvCase c;
    c.spec.kernel = k;
    c.spec.in_channels = static_cast<std::size_t>(r.integer(1, static_cast<std::int64_t>(max_cin)));
    c.spec.out_channels = static_cast<std::size_t>(r.integer(1, static_cast<std::int64_t>(max_cout)));
    c.spec.stride = static_cast<std::size_t>(r.integer(1, 3));
    c.spec.padding = static_cast<std::size_t>(r.integer(0, static_cast<std::int64_t>(k)));
    const auto min_hw = static_cast<std::int64_t>(k > 2 * c.spec.padding ? k - 2 * c.spec.padding : 1);
    c.in = {static_cast<std::size_t>(r.integer(1, 2)), c.spec.in_channels,
            static_cast<std::size_t>(r.integer(min_hw, static_cast<std::int64_t>(max_hw))),
            static_cast<std::size_t>(r.integer(min_hw, static_cast<std::int64_t>(max_hw)))};
    return c;
}

bool close_rel(double a, double ref, double rel) { return std::fabs(a - ref) <= rel * std::fabs(ref) + 1e-12; }

void check_sign(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 50;
    for (std::size_t i = 0; i < total; ++i) {
        const Shape s = random_shape(r, 3, 5, 20);
        FloatTensor x = random_tensor(r, s);
        std::vector<float> t(s.c);
        for (float& v : t) v = static_cast<float>(r.uniform(-0.5, 0.5));
        // Put some values exactly on the threshold.
        for (std::size_t k = 0; k < s.size(); k += 7) x[k] = -t[(k / s.plane()) % s.c];
        if (unpack(sign_binarize(x, ThresholdVector{t})) == oracle::sign_loop(x, t)) ++ok;
    }
    add(rep, "sign_binarize", ok == total, count_detail(ok, total, "match the element loop"));
}

void check_pack(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 500;
    for (std::size_t i = 0; i < total; ++i) {
        const Shape s = random_shape(r, 3, 6, 140);
        const FloatTensor x = random_pm1(r, s);
        const PackAxis axis = i % 2 == 0 ? PackAxis::Width : PackAxis::Filter;
        const BitTensor p = pack(x, axis);
        if (unpack(p) == x && pack(unpack(p), axis) == p && p.padding_clear()) ++ok;
    }
    add(rep, "pack_roundtrip", ok == total, count_detail(ok, total, "exact round trips"));
}

void check_alpha(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 50;
    for (std::size_t i = 0; i < total; ++i) {
        const Shape s = random_shape(r, 8, 8, 5);
        FloatTensor w = random_tensor(r, s, -2.0, 2.0);
        const auto a = compute_alpha(w).values;
        const auto ref = oracle::alpha_loop(w);
        bool good = a.size() == ref.size();
        for (std::size_t o = 0; good && o < a.size(); ++o) good = close_rel(a[o], ref[o], 1e-12) && a[o] >= 0.0;
        for (std::size_t k = 0; k < w.size(); k += 3) w[k] = -w[k];
        good = good && compute_alpha(w).values == a;
        if (good) ++ok;
    }
    add(rep, "compute_alpha", ok == total, count_detail(ok, total, "within 1e-12 and sign-flip invariant"));
}

void check_xnor(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 200;
    for (std::size_t i = 0; i < total; ++i) {
        const ConvCase c = random_conv_case(r, 70, 9, 7, 20);
        const FloatTensor x = random_pm1(r, c.in);
        const FloatTensor w = random_pm1(r, c.spec.weight_shape());
        const FloatTensor got = xnor_conv2d(pack(x), pack(w, PackAxis::Filter), c.spec);
        if (got == oracle::naive_pm1_conv(x, w, c.spec)) ++ok;
    }
    add(rep, "xnor_conv2d", ok == total, count_detail(ok, total, "exact"));
}

void check_isas(SuiteReport& rep, Rng& r) {
    const auto& ref = simd::kernels_for(simd::Isa::Scalar);
    std::string names;
    bool good = true;
    for (simd::Isa isa : simd::available_isas()) {
        names += std::string(names.empty() ? "" : ",") + std::string(simd::isa_name(isa));
        const auto& k = simd::kernels_for(isa);
        for (std::size_t trial = 0; trial < 50; ++trial) {
            const std::size_t words = static_cast<std::size_t>(r.integer(1, 12));
            const std::size_t nf = static_cast<std::size_t>(r.integer(1, 11));
            std::vector<std::uint64_t> patch(words), filters(words * nf);
            for (auto& v : patch) v = r.bits();
            for (auto& v : filters) v = r.bits();
            std::vector<std::int32_t> a(nf), b(nf);
            ref.xor_popcount_rows(patch.data(), filters.data(), words, nf, a.data());
            k.xor_popcount_rows(patch.data(), filters.data(), words, nf, b.data());
            good = good && a == b;

            const std::size_t n = static_cast<std::size_t>(r.integer(1, 77));
            std::vector<float> x(n), y1(n), y2;
            for (auto& v : x) v = static_cast<float>(r.uniform(-1, 1));
            for (auto& v : y1) v = static_cast<float>(r.uniform(-1, 1));
            y2 = y1;
            const float alpha = static_cast<float>(r.uniform(-2, 2));
            ref.axpy(alpha, x.data(), y1.data(), n);
            k.axpy(alpha, x.data(), y2.data(), n);
            good = good && std::memcmp(y1.data(), y2.data(), n * sizeof(float)) == 0;
            const double d1 = ref.dot(x.data(), y1.data(), n), d2 = k.dot(x.data(), y1.data(), n);
            double mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) mag += std::fabs(static_cast<double>(x[i]) * y1[i]);
            good = good && std::fabs(d1 - d2) <= 1e-5 * mag;
        }
    }
    add(rep, "isa_equivalence", good, "variants [" + names + "] agree with scalar");
}

struct GatedCase {
    ConvSpec spec;
    FloatTensor x, w;
    ThresholdVector t;
    GateVector beta;
};

GatedCase random_gated_case(Rng& r) {
    const ConvCase c = random_conv_case(r, 12, 6, 5, 14);
    GatedCase g{c.spec, random_tensor(r, c.in), random_tensor(r, c.spec.weight_shape()), {}, {}};
    g.t.values.resize(c.in.c);
    for (float& v : g.t.values) v = static_cast<float>(r.uniform(-0.3, 0.3));
    g.beta = {c.in.n, c.in.c, std::vector<float>(c.in.n * c.in.c)};
    for (float& v : g.beta.values) v = static_cast<float>(r.uniform(0.01, 1.0));
    return g;
}

void check_gated(SuiteReport& rep, Rng& r) {
    const std::size_t total = 100;
    std::size_t fid = 0, paths = 0, homog = 0, additive = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        const GatedCase g = random_gated_case(r);
        const FloatTensor got = gated_binary_conv(g.x, g.w, g.t, g.beta, g.spec);
        const DoubleTensor ref = oracle::gated_conv_reference(g.x, g.w, g.t.values, g.beta, g.spec);
        bool good = got.shape() == ref.shape();
        for (std::size_t k = 0; good && k < got.size(); ++k) {
            good = close_rel(got[k], ref[k], 1e-6);
            if (ref[k] != 0.0) worst = std::max(worst, std::fabs(got[k] - ref[k]) / std::fabs(ref[k]));
        }
        fid += good;

        // Uniform gates: both paths, bit for bit.
        const std::size_t n = g.x.shape().n, c = g.x.shape().c;
        GateVector uni = GateVector::uniform(n, c, 1.0f);
        bool same = gated_binary_conv(g.x, g.w, g.t, uni, g.spec, GatedPath::Literal) ==
                    gated_binary_conv(g.x, g.w, g.t, uni, g.spec, GatedPath::Packed);
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t ch = 0; ch < c; ++ch) uni.values[b * c + ch] = 0.25f + 0.5f * static_cast<float>(b);
        same = same && gated_binary_conv(g.x, g.w, g.t, uni, g.spec, GatedPath::Literal) ==
                           gated_binary_conv(g.x, g.w, g.t, uni, g.spec, GatedPath::Packed);
        paths += same;

        // Halving every gate halves the output exactly.
        GateVector half = g.beta;
        for (float& v : half.values) v *= 0.5f;
        const FloatTensor h = gated_binary_conv(g.x, g.w, g.t, half, g.spec);
        bool hom = true;
        for (std::size_t k = 0; k < got.size(); ++k) hom = hom && h[k] == 0.5f * got[k];
        homog += hom;

        // Superposition over gates: out(b1) + out(b2) == out(b1 + b2).
        GateVector b1 = g.beta, b2 = g.beta, sum = g.beta;
        for (std::size_t k = 0; k < sum.values.size(); ++k) {
            b1.values[k] = static_cast<float>(r.uniform(0.01, 0.5));
            b2.values[k] = static_cast<float>(r.uniform(0.01, 0.5));
            sum.values[k] = b1.values[k] + b2.values[k];
        }
        const FloatTensor o1 = gated_binary_conv(g.x, g.w, g.t, b1, g.spec);
        const FloatTensor o2 = gated_binary_conv(g.x, g.w, g.t, b2, g.spec);
        const FloatTensor os = gated_binary_conv(g.x, g.w, g.t, sum, g.spec);
        const auto alpha = compute_alpha(g.w).values;
        bool add_ok = true;
        const Shape so = os.shape();
        for (std::size_t k = 0; k < os.size(); ++k) {
            // Scale by the largest attainable magnitude of this output channel.
            const std::size_t o = (k / so.plane()) % so.c;
            const double bound = alpha[o] * static_cast<double>(g.spec.in_channels * g.spec.kernel * g.spec.kernel);
            add_ok = add_ok && std::fabs(static_cast<double>(o1[k]) + o2[k] - os[k]) <= 1e-6 * bound;
        }
        additive += add_ok;
    }
    add(rep, "gated_conv_fidelity", fid == total,
        count_detail(fid, total, "within 1e-6 of the per-channel oracle") + fmt(" (max rel %.2e)", worst));
    add(rep, "gated_conv_paths", paths == total, count_detail(paths, total, "literal == packed for uniform gates"));
    add(rep, "gated_conv_homogeneity", homog == total, count_detail(homog, total, "exact under beta * 0.5"));
    add(rep, "gated_conv_additivity", additive == total, count_detail(additive, total, "superposition within 1e-6"));
}

void check_rprelu(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 30;
    for (std::size_t i = 0; i < total; ++i) {
        const Shape s = random_shape(r, 2, 6, 12);
        FloatTensor x = random_tensor(r, s, -2, 2);
        RpreluParams p{std::vector<float>(s.c), std::vector<float>(s.c), std::vector<float>(s.c)};
        for (std::size_t c = 0; c < s.c; ++c) {
            p.gamma[c] = static_cast<float>(r.uniform(-0.5, 0.5));
            p.zeta[c] = static_cast<float>(r.uniform(-0.5, 0.5));
            p.slope[c] = static_cast<float>(r.uniform(0.0, 1.0));
        }
        for (std::size_t k = 0; k < s.size(); k += 5) x[k] = p.gamma[(k / s.plane()) % s.c];
        const FloatTensor y = rprelu(x, p);
        bool good = y == oracle::rprelu_loop(x, p);
        for (std::size_t k = 0; k < s.size(); k += 5) good = good && y[k] == p.zeta[(k / s.plane()) % s.c];
        ok += good;
    }
    add(rep, "rprelu", ok == total, count_detail(ok, total, "match the loop, continuous at the knee"));
}

void check_threads(SuiteReport& rep, Rng& r) {
    bool same = true;
    const std::size_t saved = thread_count();
    for (std::size_t i = 0; i < 10; ++i) {
        const GatedCase g = random_gated_case(r);
        set_thread_count(1);
        const FloatTensor a = gated_binary_conv(g.x, g.w, g.t, g.beta, g.spec);
        const auto ca = xnor_conv2d_counts(sign_binarize(g.x, g.t), sign_binarize_weights(g.w), g.spec);
        set_thread_count(4);
        const FloatTensor b = gated_binary_conv(g.x, g.w, g.t, g.beta, g.spec);
        const auto cb = xnor_conv2d_counts(sign_binarize(g.x, g.t), sign_binarize_weights(g.w), g.spec);
        same = same && a == b && ca == cb;
    }
    set_thread_count(saved);
    add(rep, "thread_determinism", same, "1 and 4 workers give identical outputs");
}

} // namespace

SuiteReport run_kernels(std::uint64_t seed) {
    SuiteReport rep{"kernels", {}, 0.0};
    Rng r(mix_seed(seed, 0x6b65726e656c73ull));
    check_sign(rep, r);
    check_pack(rep, r);
    check_alpha(rep, r);
    check_xnor(rep, r);
    check_isas(rep, r);
    check_gated(rep, r);
    check_rprelu(rep, r);
    check_threads(rep, r);
    return rep;
}

} // namespace binmoire::verify
