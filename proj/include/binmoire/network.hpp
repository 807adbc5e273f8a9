// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Binarized residual blocks and the small U-shaped restoration network built
// from them.
//
// Graph for `scales` = S levels with widths C_0..C_{S-1}:
//
//   head (full precision, io -> C_0)
//   for l < S-1:  enc{l}.b* blocks (C_l, identity shortcut), save skip l,
//                 down{l} (C_l -> C_{l+1}, stride 2, adapter shortcut)
//   enc{S-1}.b* blocks
//   for l = S-2..0: up{l} (C_{l+1} -> C_l, nearest 2x upsample, adapter
//                  shortcut), add skip l
//   tail (full precision, C_0 -> io), output = input + tail
//
// The head and tail are never binarized; every other conv is.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binmoire/binconv.hpp"
#include "binmoire/mabg.hpp"
#include "binmoire/sgra.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

struct NetworkConfig {
    std::size_t scales = 2;
    std::size_t base_channels = 16;
    std::size_t blocks_per_scale = 2;
    std::size_t kernel_size = 3;    ///< binarized convs
    std::size_t io_kernel_size = 3; ///< full-precision first/last convs
    std::size_t io_channels = 3;
    bool use_mabg = true;
    bool use_sgra = true;           ///< false: mismatched blocks get no shortcut
    std::size_t group_divisor = 1;  ///< adapter groups = gcd / divisor
    std::vector<std::string> mabg_disabled; ///< layer names with the gate off
    std::vector<std::size_t> channels;      ///< explicit widths per level; empty = base * 2^l

    std::size_t level_channels(std::size_t level) const;
    /// Throws ConfigError on any inconsistency.
    void validate() const;

    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

enum class ShortcutKind { Identity, Sgra, None };

struct BlockConfig {
    ConvSpec conv;
    bool use_mabg = false;
    ShortcutKind shortcut = ShortcutKind::Identity;
    bool upsample = false;   ///< nearest 2x before the conv and inside the adapter
    SgraGeometry sgra;       ///< meaningful when shortcut == Sgra

    /// Shape of the block output for input shape `in`.
    Shape output_shape(const Shape& in) const;
};

struct BlockParams {
    FloatTensor weight;
    ThresholdVector threshold;
    RpreluParams rprelu;
    std::optional<GateHead> gate;
    SgraParams shortcut = SgraParams::make_identity();
};

/// RPReLU(gated_binary_conv(x, ...)) + shortcut(x); the gate comes from
/// predict_gate on the block input when enabled, else beta = 1.
FloatTensor block_forward(const FloatTensor& x, const BlockConfig& cfg, const BlockParams& params);

enum class ParamRole {
    ConvWeight,
    Threshold,
    ActSlope,
    RpreluGamma,
    RpreluZeta,
    RpreluSlope,
    GateWeight,
    GateBias,
    SgraWeight,
};

const char* role_name(ParamRole r);
std::optional<ParamRole> role_from_name(const std::string& s);

struct ParamInfo {
    std::string name;
    std::string layer;
    ParamRole role;
    bool binarized = false; ///< latent weight of a binarized conv
    bool use_mabg = false;  ///< owning layer has its gate enabled
};

enum class LayerKind { FullPrecisionConv, BinaryBlock };

inline constexpr std::size_t kNoParam = static_cast<std::size_t>(-1);

struct Layer {
    std::string name;
    LayerKind kind = LayerKind::BinaryBlock;
    ConvSpec conv;
    BlockConfig block; ///< BinaryBlock only

    std::size_t weight = kNoParam;
    std::size_t threshold = kNoParam;
    std::size_t act_slope = kNoParam;
    std::size_t gamma = kNoParam;
    std::size_t zeta = kNoParam;
    std::size_t rslope = kNoParam;
    std::size_t gate_weight = kNoParam;
    std::size_t gate_bias = kNoParam;
    std::size_t sgra_weight = kNoParam;
};

enum class NodeOp { Layer, SaveSkip, AddSkip };

struct Node {
    NodeOp op;
    std::size_t index; ///< layer index or skip slot
};

class Network {
public:
    NetworkConfig config;
    std::vector<Layer> layers;
    std::vector<Node> graph;
    std::size_t skip_slots = 0;
    std::vector<ParamInfo> params;
    std::vector<FloatTensor> values;

    std::size_t find_param(const std::string& name) const; ///< kNoParam when absent
    std::size_t parameter_count() const;
    /// FNV-1a over every parameter's bytes in manifest order.
    std::uint64_t checksum() const;

    BlockParams block_params(std::size_t layer) const;

    /// Deployed forward pass: XNOR-popcount kernels for binarized blocks.
    /// Spatial dims are edge-padded up to a multiple of 2^(scales-1) and
    /// cropped back.
    FloatTensor infer(const FloatTensor& x) const;

    /// Smallest multiple the spatial dims of an input must have.
    std::size_t spatial_multiple() const { return std::size_t{1} << (config.scales - 1); }
};

/// Deterministic parameter initialisation: identical seeds give identical bits.
Network build_network(const NetworkConfig& cfg, std::uint64_t seed);

/// Full-precision conv with zero padding (head/tail layers).
template <class T>
BasicTensor<T> fp_conv(const BasicTensor<T>& x, const BasicTensor<T>& w, const ConvSpec& spec);

/// Edge-replicate spatial dims up to multiples of `m`.
FloatTensor pad_to_multiple(const FloatTensor& x, std::size_t m);
FloatTensor crop_spatial(const FloatTensor& x, std::size_t h, std::size_t w);

} // namespace binmoire
