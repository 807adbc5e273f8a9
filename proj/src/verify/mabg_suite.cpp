// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "binmoire/mabg.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "util.hpp"

namespace binmoire::verify {

using namespace detail;

namespace {

double sum_sq(const FloatTensor& t) {
    double s = 0.0;
    for (float v : t.data()) s += static_cast<double>(v) * v;
    return s;
}

Shape random_even_shape(Rng& r) {
    return {static_cast<std::size_t>(r.integer(1, 3)), static_cast<std::size_t>(r.integer(1, 5)),
            2 * static_cast<std::size_t>(r.integer(1, 12)), 2 * static_cast<std::size_t>(r.integer(1, 12))};
}

FloatTensor transpose_hw(const FloatTensor& x) {
    const Shape s = x.shape();
    FloatTensor t({s.n, s.c, s.w, s.h});
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t i = 0; i < s.h; ++i)
                for (std::size_t j = 0; j < s.w; ++j) t.at(b, c, j, i) = x.at(b, c, i, j);
    return t;
}

void check_dwt(SuiteReport& rep, Rng& r) {
    const std::size_t total = 40;
    std::size_t energy_ok = 0, recon_ok = 0;
    double worst_e = 0.0, worst_r = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        const Shape s = i == 0 ? Shape{1, 2, 8, 8} : random_even_shape(r);
        const FloatTensor x = random_tensor(r, s, -3, 3);
        const SubBands sb = haar_dwt(x);
        const double e_in = sum_sq(x);
        const double e_out = sum_sq(sb.ll) + sum_sq(sb.lh) + sum_sq(sb.hl) + sum_sq(sb.hh);
        const double rel = std::fabs(e_out - e_in) / e_in;
        worst_e = std::max(worst_e, rel);
        energy_ok += rel <= 1e-5;
        const FloatTensor back = haar_idwt(sb);
        double err = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) err = std::max(err, static_cast<double>(std::fabs(back[k] - x[k])));
        worst_r = std::max(worst_r, err);
        recon_ok += back.shape() == s && err <= 1e-5;
    }
    add(rep, "dwt_energy_conservation", energy_ok == total,
        count_detail(energy_ok, total, "within rel 1e-5") + fmt(" (max %.2e)", worst_e));
    add(rep, "dwt_reconstruction", recon_ok == total,
        count_detail(recon_ok, total, "within abs 1e-5") + fmt(" (max %.2e)", worst_r));

    const SubBands c = haar_dwt(FloatTensor({1, 1, 2, 2}, 1.0f));
    const SubBands v = haar_dwt(FloatTensor({1, 1, 2, 2}, std::vector<float>{1, -1, 1, -1}));
    const bool ex = c.ll[0] == 2.0f && c.lh[0] == 0.0f && c.hl[0] == 0.0f && c.hh[0] == 0.0f && v.lh[0] == 2.0f &&
                    v.ll[0] == 0.0f && v.hl[0] == 0.0f && v.hh[0] == 0.0f;
    add(rep, "dwt_examples", ex, "constant block -> LL only, vertical stripe -> LH only");
}

void check_energies_and_stats(SuiteReport& rep, Rng& r) {
    const std::size_t total = 30;
    std::size_t e_ok = 0, s_ok = 0;
    for (std::size_t i = 0; i < total; ++i) {
        Shape s = random_even_shape(r);
        if (i % 3 == 0) s.h += 1; // odd height goes through edge padding
        const FloatTensor x = random_tensor(r, s, -2, 2);
        const FloatTensor xp = pad_to_even(x);
        const BandEnergies e = subband_energies(haar_dwt(xp));
        const StatsDescriptors st = stats_descriptors(x);
        bool eg = true, sg = true;
        for (std::size_t p = 0; p < s.n * s.c; ++p) {
            const auto ref = oracle::haar_energies_loop(xp.raw() + p * xp.shape().plane(), xp.shape().h, xp.shape().w);
            const double got[4] = {e.ll[p], e.lh[p], e.hl[p], e.hh[p]};
            // Sub-bands are stored in float; the loop works in double.
            for (int k = 0; k < 4; ++k) eg = eg && std::fabs(got[k] - ref[k]) <= 1e-6 * std::max(1.0, ref[k]) && got[k] >= 0;
            const auto ps = oracle::plane_stats(x.raw() + p * s.plane(), s.plane());
            sg = sg && std::fabs(st.mu[p] - ps.mu) <= 1e-12 * std::max(1.0, std::fabs(ps.mu)) &&
                 std::fabs(st.sigma[p] - ps.sigma) <= 1e-12 * std::max(1.0, ps.sigma) &&
                 std::fabs(st.m_abs[p] - ps.m_abs) <= 1e-12 * std::max(1.0, ps.m_abs) && st.sigma[p] >= 0 &&
                 st.m_abs[p] >= 0;
        }
        e_ok += eg;
        s_ok += sg;
    }
    add(rep, "subband_energies", e_ok == total, count_detail(e_ok, total, "match the double-precision block loop to 1e-6"));
    add(rep, "stats_descriptors", s_ok == total, count_detail(s_ok, total, "match the loop to 1e-12"));
}

void check_descriptor_ranges(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 60;
    for (std::size_t i = 0; i < total; ++i) {
        const Shape s = random_even_shape(r);
        const double scale = std::pow(10.0, r.uniform(-4, 2));
        const FloatTensor x = random_tensor(r, s, -scale, scale);
        const FreqDescriptors f = freq_descriptors(subband_energies(haar_dwt(x)));
        bool g = true;
        for (std::size_t p = 0; p < f.r_hf.size(); ++p)
            g = g && f.r_hf[p] >= 0.0 && f.r_hf[p] <= 1.0 + 1e-6 && f.s_orient[p] >= 0.5 - 1e-6 &&
                f.s_orient[p] <= 1.0 + 1e-6;
        ok += g;
    }
    add(rep, "descriptor_ranges", ok == total, count_detail(ok, total, "inputs with r_hf in [0,1], s in [0.5,1]"));

    const FloatTensor constant({1, 1, 8, 8}, 0.7f);
    FloatTensor checker({1, 1, 8, 8});
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) checker.at(0, 0, i, j) = (i + j) % 2 == 0 ? 1.0f : -1.0f;
    const double r_const = freq_descriptors(subband_energies(haar_dwt(constant))).r_hf[0];
    const double r_check = freq_descriptors(subband_energies(haar_dwt(checker))).r_hf[0];
    add(rep, "r_hf_extremes", std::fabs(r_const) <= 1e-6 && std::fabs(r_check - 1.0) <= 1e-6,
        fmt("constant %.3g", r_const) + fmt(", checkerboard %.9f", r_check));

    const BandEnergies sym{1, 2, {3.0, 1.0}, {1.0, 3.0}, {1.0, 1.0}, {1.0, 0.5}};
    const FreqDescriptors fs = freq_descriptors(sym);
    const bool arith = std::fabs(fs.r_hf[0] - 0.5) <= 1e-6 && std::fabs(fs.s_orient[0] - 0.5) <= 1e-6 &&
                       std::fabs(fs.s_orient[1] - 0.75) <= 1e-6;
    add(rep, "freq_descriptor_examples", arith,
        fmt("r_hf %.9f", fs.r_hf[0]) + fmt(", s(E_lh=E_hl) %.9f", fs.s_orient[0]) + fmt(", s(3,1) %.9f", fs.s_orient[1]));

    std::size_t tr_ok = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        const FloatTensor x = random_tensor(r, random_even_shape(r));
        const BandEnergies a = subband_energies(haar_dwt(x));
        const BandEnergies b = subband_energies(haar_dwt(transpose_hw(x)));
        const FreqDescriptors fa = freq_descriptors(a), fb = freq_descriptors(b);
        bool g = true;
        for (std::size_t p = 0; p < a.lh.size(); ++p)
            g = g && std::fabs(a.lh[p] - b.hl[p]) <= 1e-6 * std::max(1.0, a.lh[p]) &&
                std::fabs(a.hl[p] - b.lh[p]) <= 1e-6 * std::max(1.0, a.hl[p]) &&
                std::fabs(fa.s_orient[p] - fb.s_orient[p]) <= 1e-6;
        tr_ok += g;
    }
    add(rep, "orientation_transpose_invariance", tr_ok == 20,
        count_detail(tr_ok, 20, "inputs: transpose swaps LH/HL and keeps s"));
}

void check_gate(SuiteReport& rep, Rng& r) {
    std::size_t ok = 0;
    const std::size_t total = 40;
    for (std::size_t i = 0; i < total; ++i) {
        const FloatTensor x = random_tensor(r, random_even_shape(r), -2, 2);
        GateHead h;
        for (float& w : h.weight) w = static_cast<float>(r.uniform(-5, 5));
        h.bias = i % 4 == 0 ? 1000.0f : i % 4 == 1 ? -1000.0f : static_cast<float>(r.uniform(-3, 3));
        const GateVector b = predict_gate(x, h);
        bool g = true;
        for (float v : b.values) g = g && v > 0.0f && v < 1.0f;
        ok += g;
    }
    add(rep, "beta_open_interval", ok == total, count_detail(ok, total, "gates strictly inside (0,1)"));

    const FloatTensor x = random_tensor(r, {2, 3, 6, 6});
    const GateVector z = predict_gate(x, GateHead{});
    bool half = true;
    for (float v : z.values) half = half && v == 0.5f;
    GateHead hi, lo;
    hi.bias = 10.0f;
    lo.bias = -10.0f;
    bool sat = true;
    for (float v : predict_gate(x, hi).values) sat = sat && v > 0.9999f;
    for (float v : predict_gate(x, lo).values) sat = sat && v < 0.0001f;
    add(rep, "gate_head_limits", half && sat, "zero head gives 0.5; bias +-10 gives >0.9999 / <0.0001");

    std::size_t eq = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        const Shape s{2, static_cast<std::size_t>(r.integer(2, 7)), 8, 6};
        const FloatTensor a = random_tensor(r, s);
        std::vector<std::size_t> perm(s.c);
        for (std::size_t c = 0; c < s.c; ++c) perm[c] = c;
        for (std::size_t c = s.c - 1; c > 0; --c) std::swap(perm[c], perm[static_cast<std::size_t>(r.integer(0, static_cast<std::int64_t>(c)))]);
        FloatTensor p(s);
        for (std::size_t b = 0; b < s.n; ++b)
            for (std::size_t c = 0; c < s.c; ++c) std::copy(a.plane(b, perm[c]), a.plane(b, perm[c]) + s.plane(), p.plane(b, c));
        GateHead h;
        for (float& w : h.weight) w = static_cast<float>(r.uniform(-2, 2));
        h.bias = static_cast<float>(r.uniform(-1, 1));
        const GateVector ga = predict_gate(a, h), gp = predict_gate(p, h);
        bool g = true;
        for (std::size_t b = 0; b < s.n; ++b)
            for (std::size_t c = 0; c < s.c; ++c) g = g && gp.at(b, c) == ga.at(b, perm[c]);
        eq += g;
    }
    add(rep, "permutation_equivariance", eq == 20, count_detail(eq, 20, "permutations map gates exactly"));

    // Channel 0: Nyquist checkerboard, channel 1: constant with the same mean |x|.
    FloatTensor hand({1, 2, 8, 8});
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            hand.at(0, 0, i, j) = (i + j) % 2 == 0 ? 1.0f : -1.0f;
            hand.at(0, 1, i, j) = 1.0f;
        }
    GateHead h;
    h.weight = {0, 0, 0, 4, 0};
    const GateVector g = predict_gate(hand, h);
    const double expect0 = 1.0 / (1.0 + std::exp(-4.0)), expect1 = 0.5;
    add(rep, "checkerboard_gate", g.at(0, 0) > g.at(0, 1) && std::fabs(g.at(0, 0) - expect0) < 1e-6 &&
                                      std::fabs(g.at(0, 1) - expect1) < 1e-6,
        fmt("checkerboard %.6f", g.at(0, 0)) + fmt(" > constant %.6f", g.at(0, 1)));
}

} // namespace

SuiteReport run_mabg(std::uint64_t seed) {
    SuiteReport rep{"mabg", {}, 0.0};
    Rng r(mix_seed(seed, 0x6d616267ull));
    check_dwt(rep, r);
    check_energies_and_stats(rep, r);
    check_descriptor_ranges(rep, r);
    check_gate(rep, r);
    return rep;
}

} // namespace binmoire::verify
