// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binmoire/tensor.hpp"

namespace binmoire {

/// Which logical axis the bits of one packed row run along.
///  - Width: activations; one row per (n, c, h), W bits per row.
///  - Filter: weights; one row per output channel, C_in*K*K bits per row in
///    (c, u, v) order.
enum class PackAxis { Width, Filter };

/// Bit-packed ±1 tensor. Bit 1 encodes +1, bit 0 encodes -1. Each row starts
/// on a word boundary; bits past the logical row length are always zero.
class BitTensor {
public:
    static constexpr std::size_t kWordBits = 64;

    BitTensor() = default;
    BitTensor(Shape shape, PackAxis axis);

    const Shape& shape() const { return shape_; }
    PackAxis axis() const { return axis_; }
    std::size_t rows() const { return rows_; }
    std::size_t row_bits() const { return row_bits_; }
    std::size_t words_per_row() const { return words_per_row_; }

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    std::span<const std::uint64_t> row(std::size_t r) const {
        return {words_.data() + r * words_per_row_, words_per_row_};
    }
    std::span<std::uint64_t> row(std::size_t r) { return {words_.data() + r * words_per_row_, words_per_row_}; }

    bool bit(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
        auto [r, b] = locate(n, c, h, w);
        return (words_[r * words_per_row_ + b / kWordBits] >> (b % kWordBits)) & 1u;
    }
    void set_bit(std::size_t n, std::size_t c, std::size_t h, std::size_t w, bool on);

    /// Decoded ±1 value.
    int value(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
        return bit(n, c, h, w) ? 1 : -1;
    }

    /// True when every padding bit is zero.
    bool padding_clear() const;

    friend bool operator==(const BitTensor&, const BitTensor&) = default;

private:
    std::pair<std::size_t, std::size_t> locate(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
        if (axis_ == PackAxis::Width) return {(n * shape_.c + c) * shape_.h + h, w};
        return {n, (c * shape_.h + h) * shape_.w + w};
    }

    Shape shape_{};
    PackAxis axis_ = PackAxis::Width;
    std::size_t rows_ = 0;
    std::size_t row_bits_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace binmoire
