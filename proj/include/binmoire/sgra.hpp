// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Shuffle-grouped residual adapter: g independent 1x1 projections over
// contiguous channel partitions, followed by an interleaving permutation that
// alternates channels from different partitions.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "binmoire/tensor.hpp"

namespace binmoire {

/// gcd(C_in, C_out), optionally divided by `divisor` (group-count ablation).
/// Throws ConfigError when the divisor does not divide the gcd.
std::size_t choose_groups(std::size_t in_channels, std::size_t out_channels, std::size_t divisor = 1);

/// dst channel t*g + k reads src channel k*m + t, m = C / g.
struct InterleavePerm {
    std::size_t groups = 1;
    std::size_t per_group = 1;

    InterleavePerm(std::size_t channels, std::size_t groups);

    std::size_t channels() const { return groups * per_group; }
    std::size_t source(std::size_t dst) const { return (dst % groups) * per_group + dst / groups; }
    std::vector<std::size_t> sources() const;
};

struct SgraGeometry {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t groups = 1;
    std::size_t stride = 1;  ///< spatial subsampling, samples (s*i, s*j)
    bool upsample = false;   ///< nearest-neighbour 2x before projecting

    std::size_t c_in() const { return in_channels / groups; }
    std::size_t c_out() const { return out_channels / groups; }
    std::size_t weight_count() const { return groups * c_in() * c_out(); }
    Shape output_shape(const Shape& in) const;
    void validate() const;
};

/// Partition weights W^(k), k-major, each c_out x c_in row-major.
struct SgraParams {
    bool identity = false;
    SgraGeometry geometry;
    std::vector<float> weights;

    static SgraParams make_identity() { return {true, {}, {}}; }
    /// Uniform(-1/sqrt(c_in), 1/sqrt(c_in)) fan-in initialisation.
    static SgraParams init(const SgraGeometry& g, std::uint64_t seed);

    float weight(std::size_t k, std::size_t r, std::size_t q) const {
        return weights[(k * geometry.c_out() + r) * geometry.c_in() + q];
    }
};

template <class T>
BasicTensor<T> upsample_nearest2x(const BasicTensor<T>& x);

/// Adjoint of upsample_nearest2x (sums each 2x2 block).
template <class T>
BasicTensor<T> upsample_nearest2x_backward(const BasicTensor<T>& grad);

/// U^(k)(:, i, j) = W^(k) X^(k)(:, s*i, s*j), after the optional upsample.
template <class T>
BasicTensor<T> partition_project(const BasicTensor<T>& x, std::span<const T> weights, const SgraGeometry& g);

/// Gradients of partition_project w.r.t. its (already upsampled) input and the
/// weights. Either output may be null.
template <class T>
void partition_project_backward(const BasicTensor<T>& x_resampled, std::span<const T> weights, const SgraGeometry& g,
                                const BasicTensor<T>& grad_u, BasicTensor<T>* grad_x_resampled,
                                std::vector<T>* grad_w);

template <class T>
BasicTensor<T> interleave(const BasicTensor<T>& u, std::size_t groups);

FloatTensor partition_project(const FloatTensor& x, const SgraParams& p);

/// x itself when `p` is the identity marker and shapes match; otherwise
/// interleave(partition_project(x, p), g). Throws ConfigError when the result
/// cannot have `target` shape.
FloatTensor sgra_forward(const FloatTensor& x, const SgraParams& p, const Shape& target);

struct GroupHistogram {
    std::size_t group = 0;
    std::vector<double> bin_edges; ///< bins + 1 edges, shared by every group
    std::vector<std::size_t> counts;
};

struct DistributionReport {
    std::vector<GroupHistogram> before;
    std::vector<GroupHistogram> after;
};

/// Histograms of each contiguous channel group of `u_before` and `y_after`
/// over a common value range.
DistributionReport group_distribution_report(const FloatTensor& u_before, const FloatTensor& y_after,
                                             std::size_t groups, std::size_t bins);

/// One JSON object per line: {"stage","group","bin_edges","counts"}.
std::string to_records(const DistributionReport& r);

} // namespace binmoire
