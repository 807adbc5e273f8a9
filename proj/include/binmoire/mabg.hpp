// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Moire-aware binary gate: single-level Haar sub-band energies and activation
// statistics, mapped per channel through one shared affine head + sigmoid.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "binmoire/binconv.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

/// Guard for the two descriptor ratios.
inline constexpr double kDescriptorEps = 1e-8;

/// Order of the per-channel condition vector fed to the gate head.
inline constexpr std::size_t kDescriptorCount = 5;
inline constexpr const char* kDescriptorOrder = "mu,sigma,m_abs,r_hf,s_orient";

/// Single-level orthonormal Haar sub-bands, each (B, C, H/2, W/2). First
/// letter names the row-axis filter, second the column-axis filter, so LH is
/// low-pass across rows and high-pass across columns (vertical stripes).
template <class T>
struct BasicSubBands {
    BasicTensor<T> ll, lh, hl, hh;
};
using SubBands = BasicSubBands<float>;

/// Per (sample, channel) mean |response| of each band, row-major B x C.
struct BandEnergies {
    std::size_t batch = 0, channels = 0;
    std::vector<double> ll, lh, hl, hh;
};

struct FreqDescriptors {
    std::size_t batch = 0, channels = 0;
    std::vector<double> r_hf;     ///< in [0, 1]
    std::vector<double> s_orient; ///< in [0.5, 1]
};

struct StatsDescriptors {
    std::size_t batch = 0, channels = 0;
    std::vector<double> mu, sigma, m_abs;
};

/// Condition vectors [mu, sigma, m_abs, r_hf, s_orient], one per (b, c).
struct GateDescriptors {
    std::size_t batch = 0, channels = 0;
    std::vector<std::array<double, kDescriptorCount>> rows;
};

/// Shared FC(5 -> 1) applied to every channel's condition vector.
struct GateHead {
    std::array<float, kDescriptorCount> weight{};
    float bias = 0.0f;
};

/// Edge-replicate to even height and width (no-op when already even).
template <class T>
BasicTensor<T> pad_to_even(const BasicTensor<T>& x);

/// Requires even H and W; throws DimensionError otherwise.
template <class T>
BasicSubBands<T> haar_dwt(const BasicTensor<T>& x);

template <class T>
BasicTensor<T> haar_idwt(const BasicSubBands<T>& sb);

template <class T>
BandEnergies subband_energies(const BasicSubBands<T>& sb);

FreqDescriptors freq_descriptors(const BandEnergies& e);

/// Population statistics over each H x W plane. Requires H*W >= 2.
template <class T>
StatsDescriptors stats_descriptors(const BasicTensor<T>& x);

/// Full descriptor pipeline: pad_to_even -> haar_dwt -> energies ->
/// frequency descriptors, plus statistics of the unpadded input.
template <class T>
GateDescriptors gate_descriptors(const BasicTensor<T>& x);

/// sigmoid(w . d + b), clamped into the open interval (0, 1).
double gate_value(const GateHead& head, const std::array<double, kDescriptorCount>& d);

GateVector apply_gate_head(const GateDescriptors& d, const GateHead& head);

/// beta[b,c] = sigmoid(FC([mu, sigma, m_abs, r_hf, s_orient]_{b,c})).
GateVector predict_gate(const FloatTensor& x, const GateHead& head);

} // namespace binmoire
