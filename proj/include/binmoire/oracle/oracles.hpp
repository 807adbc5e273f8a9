// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Straightforward loop implementations used only to check the library. They
// share no code with the kernels they check.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "binmoire/binconv.hpp"
#include "binmoire/sgra.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire::oracle {

/// +1 / -1 per element, x + t[c] >= 0 -> +1.
FloatTensor sign_loop(const FloatTensor& x, const std::vector<float>& t);

/// Direct convolution of ±1 operands with -1 padding, accumulated in double.
FloatTensor naive_pm1_conv(const FloatTensor& x, const FloatTensor& w, const ConvSpec& spec);

std::vector<double> alpha_loop(const FloatTensor& w);

/// out[b,o] = alpha[o] * sum_c beta[b,c] * sum_{u,v} sign(x+t)[c] * sign(w)[o,c],
/// everything in double.
DoubleTensor gated_conv_reference(const FloatTensor& xf, const FloatTensor& wf, const std::vector<float>& t,
                                  const GateVector& beta, const ConvSpec& spec);

FloatTensor rprelu_loop(const FloatTensor& x, const RpreluParams& p);

std::size_t euclid_gcd(std::size_t a, std::size_t b);

/// C_out x C_in dense matrix with the partition weights on the diagonal blocks.
std::vector<double> block_diagonal(const SgraParams& p);

/// y[o] = sum_i m[o, i] * x[i] at sampled / upsampled positions.
FloatTensor dense_project(const FloatTensor& x, const std::vector<double>& m, std::size_t cout, std::size_t stride,
                          bool upsample);

/// Y[:, t*g + k] = U[:, k*m + t] by direct enumeration.
FloatTensor interleave_loop(const FloatTensor& u, std::size_t g);

struct PlaneStats {
    double mu, sigma, m_abs;
};
PlaneStats plane_stats(const float* p, std::size_t n);

/// [LL, LH, HL, HH] mean-|.| energies of one plane, from explicit 2x2 blocks.
std::array<double, 4> haar_energies_loop(const float* p, std::size_t h, std::size_t w);

double psnr_loop(const FloatTensor& a, const FloatTensor& b, double peak);
double ssim_loop(const FloatTensor& a, const FloatTensor& b, std::size_t window, double range);

} // namespace binmoire::oracle
