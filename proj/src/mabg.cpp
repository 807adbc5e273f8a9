// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/mabg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace binmoire {

template <class T>
BasicTensor<T> pad_to_even(const BasicTensor<T>& x) {
    const Shape s = x.shape();
    if (s.h % 2 == 0 && s.w % 2 == 0) return x;
    const Shape ps{s.n, s.c, s.h + s.h % 2, s.w + s.w % 2};
    BasicTensor<T> out(ps);
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t y = 0; y < ps.h; ++y)
                for (std::size_t xx = 0; xx < ps.w; ++xx)
                    out.at(b, c, y, xx) = x.at(b, c, std::min(y, s.h - 1), std::min(xx, s.w - 1));
    return out;
}

template <class T>
BasicSubBands<T> haar_dwt(const BasicTensor<T>& x) {
    const Shape s = x.shape();
    if (s.h % 2 != 0 || s.w % 2 != 0) throw DimensionError("haar_dwt: input " + s.str() + " must have even H and W");
    const Shape hs{s.n, s.c, s.h / 2, s.w / 2};
    BasicSubBands<T> sb{BasicTensor<T>(hs), BasicTensor<T>(hs), BasicTensor<T>(hs), BasicTensor<T>(hs)};
    for (std::size_t b = 0; b < s.n; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
            for (std::size_t i = 0; i < hs.h; ++i)
                for (std::size_t j = 0; j < hs.w; ++j) {
                    const T a = x.at(b, c, 2 * i, 2 * j);
                    const T bb = x.at(b, c, 2 * i, 2 * j + 1);
                    const T cc = x.at(b, c, 2 * i + 1, 2 * j);
                    const T d = x.at(b, c, 2 * i + 1, 2 * j + 1);
                    sb.ll.at(b, c, i, j) = (a + bb + cc + d) / T(2);
                    sb.lh.at(b, c, i, j) = (a - bb + cc - d) / T(2);
                    sb.hl.at(b, c, i, j) = (a + bb - cc - d) / T(2);
                    sb.hh.at(b, c, i, j) = (a - bb - cc + d) / T(2);
                }
    return sb;
}

template <class T>
BasicTensor<T> haar_idwt(const BasicSubBands<T>& sb) {
    const Shape hs = sb.ll.shape();
    require_same_shape(sb.lh.shape(), hs, "haar_idwt");
    require_same_shape(sb.hl.shape(), hs, "haar_idwt");
    require_same_shape(sb.hh.shape(), hs, "haar_idwt");
    BasicTensor<T> x({hs.n, hs.c, hs.h * 2, hs.w * 2});
    for (std::size_t b = 0; b < hs.n; ++b)
        for (std::size_t c = 0; c < hs.c; ++c)
            for (std::size_t i = 0; i < hs.h; ++i)
                for (std::size_t j = 0; j < hs.w; ++j) {
                    const T ll = sb.ll.at(b, c, i, j), lh = sb.lh.at(b, c, i, j);
                    const T hl = sb.hl.at(b, c, i, j), hh = sb.hh.at(b, c, i, j);
                    x.at(b, c, 2 * i, 2 * j) = (ll + lh + hl + hh) / T(2);
                    x.at(b, c, 2 * i, 2 * j + 1) = (ll - lh + hl - hh) / T(2);
                    x.at(b, c, 2 * i + 1, 2 * j) = (ll + lh - hl - hh) / T(2);
                    x.at(b, c, 2 * i + 1, 2 * j + 1) = (ll - lh - hl + hh) / T(2);
                }
    return x;
}

namespace {

template <class T>
std::vector<double> mean_abs_per_plane(const BasicTensor<T>& t) {
    const Shape s = t.shape();
    std::vector<double> out(s.n * s.c);
    for (std::size_t p = 0; p < s.n * s.c; ++p) {
        const T* src = t.raw() + p * s.plane();
        double acc = 0.0;
        for (std::size_t i = 0; i < s.plane(); ++i) acc += std::abs(static_cast<double>(src[i]));
        out[p] = acc / static_cast<double>(s.plane());
    }
    return out;
}

} // namespace

template <class T>
BandEnergies subband_energies(const BasicSubBands<T>& sb) {
    const Shape s = sb.ll.shape();
    return {s.n, s.c, mean_abs_per_plane(sb.ll), mean_abs_per_plane(sb.lh), mean_abs_per_plane(sb.hl),
            mean_abs_per_plane(sb.hh)};
}

FreqDescriptors freq_descriptors(const BandEnergies& e) {
    const std::size_t n = e.batch * e.channels;
    if (e.ll.size() != n || e.lh.size() != n || e.hl.size() != n || e.hh.size() != n)
        throw DimensionError("freq_descriptors: energy vectors must hold batch*channels entries");
    FreqDescriptors d{e.batch, e.channels, std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double detail = e.lh[i] + e.hl[i] + e.hh[i];
        d.r_hf[i] = detail / (e.ll[i] + detail + kDescriptorEps);
        d.s_orient[i] = std::max(e.lh[i], e.hl[i]) / (e.lh[i] + e.hl[i] + kDescriptorEps);
    }
    return d;
}

template <class T>
StatsDescriptors stats_descriptors(const BasicTensor<T>& x) {
    const Shape s = x.shape();
    if (s.plane() < 2) throw DimensionError("stats_descriptors: need at least 2 spatial elements, got " + s.str());
    const std::size_t n = s.n * s.c;
    StatsDescriptors d{s.n, s.c, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    const double count = static_cast<double>(s.plane());
    for (std::size_t p = 0; p < n; ++p) {
        const T* src = x.raw() + p * s.plane();
        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t i = 0; i < s.plane(); ++i) {
            sum += src[i];
            abs_sum += std::abs(static_cast<double>(src[i]));
        }
        const double mu = sum / count;
        double var = 0.0;
        for (std::size_t i = 0; i < s.plane(); ++i) {
            const double dlt = static_cast<double>(src[i]) - mu;
            var += dlt * dlt;
        }
        d.mu[p] = mu;
        d.sigma[p] = std::sqrt(var / count);
        d.m_abs[p] = abs_sum / count;
    }
    return d;
}

template <class T>
GateDescriptors gate_descriptors(const BasicTensor<T>& x) {
    const StatsDescriptors st = stats_descriptors(x);
    const FreqDescriptors fq = freq_descriptors(subband_energies(haar_dwt(pad_to_even(x))));
    GateDescriptors g{st.batch, st.channels, {}};
    g.rows.resize(st.mu.size());
    for (std::size_t i = 0; i < g.rows.size(); ++i)
        g.rows[i] = {st.mu[i], st.sigma[i], st.m_abs[i], fq.r_hf[i], fq.s_orient[i]};
    return g;
}

double gate_value(const GateHead& head, const std::array<double, kDescriptorCount>& d) {
    double z = head.bias;
    for (std::size_t k = 0; k < kDescriptorCount; ++k) z += static_cast<double>(head.weight[k]) * d[k];
    const double beta = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(beta, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

GateVector apply_gate_head(const GateDescriptors& d, const GateHead& head) {
    GateVector g{d.batch, d.channels, std::vector<float>(d.rows.size())};
    for (std::size_t i = 0; i < d.rows.size(); ++i)
        g.values[i] = std::clamp(static_cast<float>(gate_value(head, d.rows[i])), std::numeric_limits<float>::min(),
                                 std::nextafter(1.0f, 0.0f));
    return g;
}

GateVector predict_gate(const FloatTensor& x, const GateHead& head) { return apply_gate_head(gate_descriptors(x), head); }

#define BINMOIRE_MABG_INSTANTIATE(T)                                            \
    template BasicTensor<T> pad_to_even(const BasicTensor<T>&);                 \
    template BasicSubBands<T> haar_dwt(const BasicTensor<T>&);                  \
    template BasicTensor<T> haar_idwt(const BasicSubBands<T>&);                 \
    template BandEnergies subband_energies(const BasicSubBands<T>&);            \
    template StatsDescriptors stats_descriptors(const BasicTensor<T>&);         \
    template GateDescriptors gate_descriptors(const BasicTensor<T>&);

BINMOIRE_MABG_INSTANTIATE(float)
BINMOIRE_MABG_INSTANTIATE(double)

#undef BINMOIRE_MABG_INSTANTIATE

} // namespace binmoire
