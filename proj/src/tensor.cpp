// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "binmoire/binarize.hpp"
#include "binmoire/bit_tensor.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

std::string Shape::str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

BitTensor::BitTensor(Shape shape, PackAxis axis) : shape_(shape), axis_(axis) {
    if (!shape.valid()) throw DimensionError("bit tensor shape must be positive, got " + shape.str());
    if (axis == PackAxis::Width) {
        rows_ = shape.n * shape.c * shape.h;
        row_bits_ = shape.w;
    } else {
        rows_ = shape.n;
        row_bits_ = shape.c * shape.h * shape.w;
    }
    words_per_row_ = (row_bits_ + kWordBits - 1) / kWordBits;
    words_.assign(rows_ * words_per_row_, 0);
}

void BitTensor::set_bit(std::size_t n, std::size_t c, std::size_t h, std::size_t w, bool on) {
    auto [r, b] = locate(n, c, h, w);
    std::uint64_t& word = words_[r * words_per_row_ + b / kWordBits];
    const std::uint64_t mask = std::uint64_t{1} << (b % kWordBits);
    word = on ? (word | mask) : (word & ~mask);
}

bool BitTensor::padding_clear() const {
    const std::size_t tail = row_bits_ % kWordBits;
    if (tail == 0) return true;
    const std::uint64_t live = (std::uint64_t{1} << tail) - 1;
    for (std::size_t r = 0; r < rows_; ++r)
        if (words_[r * words_per_row_ + words_per_row_ - 1] & ~live) return false;
    return true;
}

namespace {

// Walk a tensor in storage order, which is also packed-bit order for both
// axes: (n,c,h) rows of w bits, or n rows of (c,h,w) bits.
template <class Pred>
BitTensor pack_with(const FloatTensor& x, PackAxis axis, Pred positive) {
    BitTensor out(x.shape(), axis);
    const std::size_t rows = out.rows();
    const std::size_t bits = out.row_bits();
    const std::size_t wpr = out.words_per_row();
    auto words = out.words();
    const float* src = x.raw();
    for (std::size_t r = 0; r < rows; ++r) {
        std::uint64_t* dst = words.data() + r * wpr;
        for (std::size_t b = 0; b < bits; ++b) {
            if (positive(r * bits + b, src[r * bits + b]))
                dst[b / BitTensor::kWordBits] |= std::uint64_t{1} << (b % BitTensor::kWordBits);
        }
    }
    return out;
}

} // namespace

BitTensor sign_binarize(const FloatTensor& x, const ThresholdVector& t) {
    const Shape& s = x.shape();
    if (t.values.size() != s.c)
        throw DimensionError("sign_binarize: threshold length " + std::to_string(t.values.size()) +
                             " != channel count " + std::to_string(s.c));
    const std::size_t plane = s.plane();
    return pack_with(x, PackAxis::Width, [&](std::size_t i, float v) {
        const std::size_t c = (i / plane) % s.c;
        return v + t.values[c] >= 0.0f;
    });
}

BitTensor sign_binarize_weights(const FloatTensor& w) {
    return pack_with(w, PackAxis::Filter, [](std::size_t, float v) { return v >= 0.0f; });
}

BitTensor pack(const FloatTensor& x, PackAxis axis) {
    return pack_with(x, axis, [](std::size_t i, float v) {
        if (v == 1.0f) return true;
        if (v == -1.0f) return false;
        throw DomainError("pack: element " + std::to_string(i) + " is " + std::to_string(v) + ", expected +1 or -1");
    });
}

FloatTensor unpack(const BitTensor& x) {
    FloatTensor out(x.shape());
    const std::size_t bits = x.row_bits();
    float* dst = out.raw();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t b = 0; b < bits; ++b)
            dst[r * bits + b] = ((row[b / BitTensor::kWordBits] >> (b % BitTensor::kWordBits)) & 1u) ? 1.0f : -1.0f;
    }
    return out;
}

AlphaVector compute_alpha(const FloatTensor& w) {
    const Shape& s = w.shape();
    const std::size_t fan = s.c * s.h * s.w;
    AlphaVector a;
    a.values.resize(s.n);
    for (std::size_t o = 0; o < s.n; ++o) {
        double acc = 0.0;
        const float* f = w.raw() + o * fan;
        for (std::size_t i = 0; i < fan; ++i) acc += std::abs(static_cast<double>(f[i]));
        a.values[o] = acc / static_cast<double>(fan);
    }
    return a;
}

} // namespace binmoire
