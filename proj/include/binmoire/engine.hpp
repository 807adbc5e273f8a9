// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Reverse-mode gradients for exactly the ops the toy network uses. Binarized
// convs run as dense float convs over the ±1 (or surrogate) operands.
//
// BinarizeMode::Sign is the training graph: sign() forward with the tanh
// straight-through rule backward for activations and the clipped rule for
// weights. BinarizeMode::Surrogate replaces the forward with the functions
// those rules differentiate, tanh(slope * (x + t)) and clip(w, -1, 1), so the
// same backward code is an exact gradient and can be checked numerically.
//
// Gate descriptors are conditioning inputs: no gradient flows through them
// into the activations, only into the gate head.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "binmoire/mabg.hpp"
#include "binmoire/network.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

enum class BinarizeMode { Sign, Surrogate };

template <class T>
using ParamSet = std::vector<BasicTensor<T>>;

template <class T>
ParamSet<T> cast_params(const std::vector<FloatTensor>& values) {
    ParamSet<T> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.template cast<T>());
    return out;
}

/// Zero tensors shaped like `params`.
template <class T>
ParamSet<T> zeros_like(const ParamSet<T>& params) {
    ParamSet<T> out;
    out.reserve(params.size());
    for (const auto& p : params) out.emplace_back(p.shape());
    return out;
}

struct EngineOptions {
    BinarizeMode mode = BinarizeMode::Sign;
    /// Per graph node; when set, gate descriptors come from here instead of
    /// from the node input (keeps them fixed across finite-difference probes).
    const std::vector<std::optional<GateDescriptors>>* frozen_descriptors = nullptr;
};

template <class T>
struct NodeCache {
    BasicTensor<T> x;        ///< node input
    BasicTensor<T> xpad;     ///< full-precision layers: zero-padded input
    // binary blocks
    std::optional<GateDescriptors> descriptors;
    std::vector<T> beta;     ///< B x C_in, empty when the gate is off
    BasicTensor<T> u;        ///< conv input + threshold
    BasicTensor<T> apad;     ///< binarized activations, padded with -1
    BasicTensor<T> agate;    ///< apad scaled per channel by beta
    BasicTensor<T> wbin;     ///< binarized weights (before alpha)
    std::vector<T> alpha;
    BasicTensor<T> weff;     ///< alpha * wbin
    BasicTensor<T> pre;      ///< conv output, RPReLU input
    BasicTensor<T> xr;       ///< adapter input after upsampling
};

template <class T>
struct Tape {
    BasicTensor<T> input;
    std::vector<NodeCache<T>> nodes;

    /// Descriptors recorded by the forward pass, in the form accepted by
    /// EngineOptions::frozen_descriptors.
    std::vector<std::optional<GateDescriptors>> descriptors() const;
};

/// Training forward pass. Spatial dims must be multiples of
/// net.spatial_multiple(). `tape` may be null.
template <class T>
BasicTensor<T> forward_train(const Network& net, const ParamSet<T>& params, const BasicTensor<T>& x, Tape<T>* tape,
                             const EngineOptions& opt = {});

/// Gradients of sum(grad_out * output) w.r.t. every parameter.
template <class T>
ParamSet<T> backward(const Network& net, const ParamSet<T>& params, const Tape<T>& tape, const BasicTensor<T>& grad_out);

template <class T>
struct ActGrads {
    BasicTensor<T> grad_x;
    std::vector<T> grad_t;
    T grad_slope = T(0);
};

/// tanh straight-through rule at u = x + t[c]:
///   d/dx = slope * (1 - tanh^2(slope * u)), d/dslope = u * (1 - tanh^2(slope * u)).
template <class T>
ActGrads<T> ste_act_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& x, const std::vector<T>& t, T slope);

/// grad_out where |w| <= 1, else 0.
template <class T>
BasicTensor<T> ste_weight_backward(const BasicTensor<T>& grad_out, const BasicTensor<T>& w_latent);

/// Mean |a - b| and its gradient w.r.t. a (sign(a - b) / N, 0 at ties).
template <class T>
T l1_loss(const BasicTensor<T>& a, const BasicTensor<T>& b, BasicTensor<T>* grad_a);

} // namespace binmoire
