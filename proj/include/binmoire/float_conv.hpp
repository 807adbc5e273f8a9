// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Dense full-precision convolution used by the gradient engine and by the
// full-precision first/last layers. Strided convolutions are rewritten as
// stride-1 correlations over the s*s polyphase components of the padded
// input, and each (o, c, u, v) tap becomes one long axpy/dot over a "wide"
// output plane whose row pitch equals the component width. Columns past the
// valid output width are scratch and discarded.

#pragma once

#include <cstddef>
#include <span>

#include "binmoire/tensor.hpp"

namespace binmoire {

/// Pad every plane by `pad` on all four sides; channel c is filled with
/// `value[c]` (or value[0] when one value is given).
template <class T>
BasicTensor<T> pad_planes(const BasicTensor<T>& x, std::size_t pad, std::span<const T> value);

/// Interior of a padded tensor (inverse of pad_planes, for gradients).
template <class T>
BasicTensor<T> crop_planes(const BasicTensor<T>& xpad, std::size_t pad);

/// out[b,o,i,j] = sum_{c,u,v} w[o,c,u,v] * xpad[b,c,i*s+u,j*s+v], no padding
/// applied here.
template <class T>
BasicTensor<T> conv2d_valid(const BasicTensor<T>& xpad, const BasicTensor<T>& w, std::size_t stride);

/// Gradients of conv2d_valid. Either output pointer may be null. Results are
/// written (not accumulated).
template <class T>
void conv2d_valid_backward(const BasicTensor<T>& xpad, const BasicTensor<T>& w, std::size_t stride,
                           const BasicTensor<T>& grad_out, BasicTensor<T>* grad_xpad, BasicTensor<T>* grad_w);

} // namespace binmoire
