// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Binary portable pixmaps (P6, maxval 255). Values live in [0, 1] and map to
// bytes as lround(v * 255) after clamping. Readers accept comments and any
// whitespace in the header; writers always emit "P6\n<w> <h>\n255\n".

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "binmoire/tensor.hpp"

namespace binmoire {

struct ImageBuffer {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<float> data; ///< planar: 3 x height x width

    /// (1, 3, H, W) tensor.
    FloatTensor to_tensor() const;
    /// Batch 0 of a 3-channel tensor.
    static ImageBuffer from_tensor(const FloatTensor& t);
};

std::uint8_t quantize(float v);

/// Throws IoError when the file cannot be opened, FormatError on a malformed
/// header or truncated payload.
ImageBuffer read_image(const std::string& path);
ImageBuffer decode_ppm(const std::vector<std::uint8_t>& bytes);

void write_image(const std::string& path, const ImageBuffer& img);
std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img);

} // namespace binmoire
