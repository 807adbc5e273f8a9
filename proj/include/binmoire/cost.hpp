// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Params/OPs accounting. OPs are multiply-accumulates; binarized rows are
// charged params/32 and ops/64 of their full-precision equivalents. Every
// binary block contributes up to four rows:
//
//   <layer>.conv  binarized conv weights and MACs
//   <layer>.aux   thresholds, alpha, RPReLU (3 per output channel), residual add
//   <layer>.mabg  gate head (6 params); descriptors 8 ops per input element,
//                 gate application 1 op per input element, head 5 per channel
//   <layer>.sgra  C_in * C_out / g weights, C_out * c_in MACs per output pixel

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "binmoire/binconv.hpp"
#include "binmoire/network.hpp"

namespace binmoire {

struct CostRow {
    std::string name;
    std::uint64_t params_f = 0; ///< full-precision-equivalent parameter count
    std::uint64_t ops_f = 0;    ///< full-precision-equivalent MACs
    double params_b = 0.0;      ///< params_f / 32 on binarized rows, else 0
    double ops_b = 0.0;         ///< ops_f / 64 on binarized rows, else 0
    bool binarized = false;

    double params() const { return binarized ? params_b : static_cast<double>(params_f); }
    double ops() const { return binarized ? ops_b : static_cast<double>(ops_f); }
};

struct CostReport {
    std::size_t input_h = 0, input_w = 0;
    std::vector<CostRow> rows;

    double params_b() const; ///< sum of binarized rows' params_b
    double params_f() const; ///< sum of full-precision rows' params_f
    double ops_b() const;
    double ops_f() const;
    double params() const { return params_b() + params_f(); }
    double ops() const { return ops_b() + ops_f(); }

    std::string table() const;
    /// One JSON object per row plus a final {"total": ...} record.
    std::string records() const;
};

/// Row for a single conv whose output is out_h x out_w.
CostRow conv_cost(const std::string& name, const ConvSpec& spec, std::size_t out_h, std::size_t out_w, bool binarized);

/// Throws ConfigError when the input dims are zero.
CostReport count_params_ops(const Network& net, std::size_t input_h = 256, std::size_t input_w = 256);

} // namespace binmoire
