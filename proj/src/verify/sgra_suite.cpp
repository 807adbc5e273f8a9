// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binmoire/error.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "binmoire/sgra.hpp"
#include "util.hpp"

namespace binmoire::verify {

using namespace detail;

namespace {

std::size_t pick(Rng& r, std::initializer_list<std::size_t> xs) {
    return *(xs.begin() + r.integer(0, static_cast<std::int64_t>(xs.size()) - 1));
}

bool identical(const FloatTensor& a, const FloatTensor& b) { return a.shape() == b.shape() && a == b; }

void check_interleave(SuiteReport& rep, Rng& r) {
    std::size_t bij = 0, inv = 0, loop = 0, total = 0;
    for (std::size_t c = 1; c <= 48; ++c)
        for (std::size_t g = 1; g <= c; ++g) {
            if (c % g != 0) continue;
            ++total;
            const InterleavePerm p(c, g);
            std::vector<std::size_t> src = p.sources();
            std::sort(src.begin(), src.end());
            std::vector<std::size_t> id(c);
            std::iota(id.begin(), id.end(), 0);
            bij += src == id;

            const FloatTensor u = random_tensor(r, {2, c, 2, 3});
            inv += identical(interleave(interleave(u, g), c / g), u) && identical(interleave(interleave(u, c / g), g), u);
            loop += identical(interleave(u, g), oracle::interleave_loop(u, g));
        }
    add(rep, "interleave_bijection", bij == total, count_detail(bij, total, "(C, g) pairs are permutations"));
    add(rep, "interleave_inverse_pair", inv == total, count_detail(inv, total, "(g, m) pairs invert exactly"));
    add(rep, "interleave_index_map", loop == total, count_detail(loop, total, "match direct enumeration"));
    const std::vector<std::size_t> six = InterleavePerm(6, 2).sources();
    const std::vector<std::size_t> want{0, 3, 1, 4, 2, 5};
    const bool trivial = InterleavePerm(7, 1).sources() == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6} &&
                         InterleavePerm(5, 5).sources() == std::vector<std::size_t>{0, 1, 2, 3, 4};
    add(rep, "interleave_example", six == want && trivial, "C=6, g=2 reads [0,3,1,4,2,5]; g=1 and m=1 are identity");
}

void check_groups(SuiteReport& rep, Rng& r) {
    bool ok = choose_groups(64, 32) == 32 && choose_groups(48, 36) == 12 && choose_groups(17, 17) == 17;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        const auto a = static_cast<std::size_t>(r.integer(1, 512)), b = static_cast<std::size_t>(r.integer(1, 512));
        agree += choose_groups(a, b) == oracle::euclid_gcd(a, b);
    }
    bool threw = false;
    try {
        (void)choose_groups(48, 36, 5);
    } catch (const ConfigError&) {
        threw = true;
    }
    add(rep, "choose_groups", ok && agree == 200 && threw,
        count_detail(agree, 200, "random pairs agree with Euclid; (64,32)->32, (48,36)->12, bad divisor rejected"));
}

void check_projection(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 60;
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t cin = pick(r, {1, 2, 3, 4, 6, 8, 12, 16, 24, 32});
        const std::size_t cout = pick(r, {1, 2, 3, 4, 6, 8, 12, 16, 24, 32});
        const std::size_t g = i % 5 == 0 ? 1 : choose_groups(cin, cout);
        const bool up = i % 4 == 3;
        const std::size_t stride = up ? 1 : static_cast<std::size_t>(r.integer(1, 3));
        const SgraGeometry geom{cin, cout, g, stride, up};
        const SgraParams p = SgraParams::init(geom, r.bits());
        const FloatTensor x = random_tensor(r, {static_cast<std::size_t>(r.integer(1, 2)), cin,
                                                static_cast<std::size_t>(r.integer(1, 9)),
                                                static_cast<std::size_t>(r.integer(1, 9))});
        const FloatTensor want = oracle::dense_project(x, oracle::block_diagonal(p), cout, stride, up);
        ok += identical(partition_project(x, p), want);
    }
    add(rep, "block_diagonal_equivalence", ok == total, count_detail(ok, total, "projections bit-identical to the dense oracle"));

    // g = C: per-channel scaling; unit scalars give the identity map.
    const SgraGeometry diag{5, 5, 5, 1, false};
    SgraParams unit{false, diag, std::vector<float>(5, 1.0f)};
    const FloatTensor x = random_tensor(r, {2, 5, 4, 4});
    add(rep, "unit_scalar_identity", identical(partition_project(x, unit), x), "g=C with unit weights is the identity");
}

void check_parameter_law(SuiteReport& rep, Rng& r) {
    struct Combo {
        std::size_t cin, cout;
    };
    const Combo combos[] = {{64, 32}, {32, 64}, {64, 64}, {48, 36}, {128, 64}, {96, 64}, {16, 32},
                            {256, 128}, {24, 48}, {80, 40}, {64, 128}, {192, 128}, {72, 48}, {40, 80},
                            {160, 96}, {32, 32}, {112, 56}, {144, 96}, {120, 80}, {256, 512}};
    std::size_t ok = 0, total = 0, mono = 0, mono_total = 0;
    for (const Combo& c : combos) {
        const std::size_t gcd = oracle::euclid_gcd(c.cin, c.cout);
        std::size_t prev = 0;
        bool decreasing = true;
        for (std::size_t d = 1; d <= 8; d *= 2) {
            if (gcd % d != 0) continue;
            const std::size_t g = choose_groups(c.cin, c.cout, d);
            const SgraGeometry geom{c.cin, c.cout, g, 1, false};
            const SgraParams p = SgraParams::init(geom, r.bits());
            ++total;
            ok += p.weights.size() == c.cin * c.cout / g && g == gcd / d;
            // Halving g (doubling the divisor) must strictly increase the count.
            if (prev != 0) decreasing = decreasing && p.weights.size() > prev;
            prev = p.weights.size();
        }
        ++mono_total;
        mono += decreasing;
    }
    add(rep, "parameter_count_law", ok == total && mono == mono_total,
        count_detail(ok, total, "(C_in, C_out, divisor) settings give C_in*C_out/g") + "; " +
            count_detail(mono, mono_total, "combos grow monotonically as g shrinks"));
}

void check_forward(SuiteReport& rep, Rng& r) {
    const FloatTensor x = random_tensor(r, {2, 6, 5, 5});
    add(rep, "identity_shortcut", identical(sgra_forward(x, SgraParams::make_identity(), x.shape()), x),
        "matching shapes return the input bit-for-bit");

    const SgraGeometry g64{64, 32, choose_groups(64, 32), 1, false};
    const SgraParams p64 = SgraParams::init(g64, 11);
    const FloatTensor x64 = random_tensor(r, {1, 64, 6, 6});
    const FloatTensor composed =
        oracle::interleave_loop(oracle::dense_project(x64, oracle::block_diagonal(p64), 32, 1, false), g64.groups);
    add(rep, "composed_oracle", g64.groups == 32 && p64.weights.size() == 64 &&
                                    identical(sgra_forward(x64, p64, {1, 32, 6, 6}), composed),
        "64->32 at g=32 (64 weights) equals block-diagonal plus permutation");

    const SgraGeometry gup{32, 64, choose_groups(32, 64), 1, true};
    const FloatTensor x32 = random_tensor(r, {1, 32, 5, 7});
    const FloatTensor up = sgra_forward(x32, SgraParams::init(gup, 3), {1, 64, 10, 14});
    add(rep, "upsample_shape", up.shape() == Shape{1, 64, 10, 14}, "32->64 with upsampling gives " + up.shape().str());

    bool threw = false;
    try {
        (void)sgra_forward(x32, SgraParams::init(gup, 3), {1, 64, 5, 7});
    } catch (const ConfigError&) {
        threw = true;
    }
    add(rep, "unreachable_target", threw, "unreachable target shape is rejected");

    std::size_t lin = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::size_t cin = pick(r, {4, 6, 8, 12}), cout = pick(r, {4, 6, 8, 12});
        const std::size_t stride = static_cast<std::size_t>(r.integer(1, 2));
        const SgraGeometry geom{cin, cout, choose_groups(cin, cout), stride, false};
        const SgraParams p = SgraParams::init(geom, r.bits());
        const Shape s{2, cin, 6, 6};
        const Shape target = geom.output_shape(s);
        const FloatTensor a = random_tensor(r, s), b = random_tensor(r, s);
        const float ca = static_cast<float>(r.uniform(-2, 2)), cb = static_cast<float>(r.uniform(-2, 2));
        FloatTensor mix(s);
        for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = ca * a[k] + cb * b[k];
        const FloatTensor fm = sgra_forward(mix, p, target), fa = sgra_forward(a, p, target),
                          fb = sgra_forward(b, p, target);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < fm.size(); ++k) {
            const double e = static_cast<double>(ca) * fa[k] + static_cast<double>(cb) * fb[k];
            num = std::max(num, std::fabs(fm[k] - e));
            den = std::max(den, std::fabs(e));
        }
        const double rel = num / std::max(den, 1e-30);
        worst = std::max(worst, rel);
        lin += rel <= 1e-6;
    }
    add(rep, "linearity", lin == 20, count_detail(lin, 20, "cases within rel 1e-6") + fmt(" (max %.2e)", worst));
}

void check_histograms(SuiteReport& rep, Rng& r) {
    const FloatTensor u = random_tensor(r, {2, 8, 6, 6});
    const FloatTensor y = interleave(u, 2);
    const DistributionReport d = group_distribution_report(u, y, 2, 16);
    bool conserved = d.before.size() == 2 && d.after.size() == 2;
    std::size_t sum_before = 0, sum_after = 0;
    for (std::size_t b = 0; conserved && b < 16; ++b) {
        const std::size_t before = d.before[0].counts[b] + d.before[1].counts[b];
        const std::size_t after = d.after[0].counts[b] + d.after[1].counts[b];
        conserved = before == after;
        sum_before += before;
        sum_after += after;
    }
    conserved = conserved && sum_before == u.size() && sum_after == u.size();

    const FloatTensor flat({1, 4, 3, 3}, 0.25f);
    const DistributionReport dc = group_distribution_report(flat, flat, 2, 4);
    bool single = true;
    for (const auto& h : dc.before) single = single && h.counts[0] == 18 && h.counts[1] + h.counts[2] + h.counts[3] == 0;
    const DistributionReport d1 = group_distribution_report(u, interleave(u, 1), 1, 8);
    const bool same = d1.before[0].counts == d1.after[0].counts;
    add(rep, "histogram_counts", conserved && single && same,
        "g=2 pair totals conserved per bin; constant input fills one bin; g=1 unchanged");
}

} // namespace

SuiteReport run_sgra(std::uint64_t seed) {
    SuiteReport rep{"sgra", {}, 0.0};
    Rng r(mix_seed(seed, 0x73677261ull));
    check_interleave(rep, r);
    check_groups(rep, r);
    check_projection(rep, r);
    check_parameter_law(rep, r);
    check_forward(rep, r);
    check_histograms(rep, r);
    return rep;
}

} // namespace binmoire::verify
