// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace binmoire {

FloatTensor ImageBuffer::to_tensor() const {
    return FloatTensor({1, 3, height, width}, data);
}

ImageBuffer ImageBuffer::from_tensor(const FloatTensor& t) {
    const Shape s = t.shape();
    if (s.c != 3) throw DimensionError("image: tensor must have 3 channels, got " + s.str());
    ImageBuffer img{s.w, s.h, std::vector<float>(3 * s.plane())};
    std::copy(t.raw(), t.raw() + 3 * s.plane(), img.data.begin());
    return img;
}

std::uint8_t quantize(float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

namespace {

class HeaderReader {
public:
    explicit HeaderReader(const std::vector<std::uint8_t>& b) : b_(b) {}

    void skip_space_and_comments() {
        while (pos_ < b_.size()) {
            if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(b_[pos_]) != 0) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    std::size_t number(const char* what) {
        skip_space_and_comments();
        if (pos_ >= b_.size() || std::isdigit(b_[pos_]) == 0)
            throw FormatError(std::string("pixmap: expected ") + what + " in header");
        std::size_t v = 0;
        while (pos_ < b_.size() && std::isdigit(b_[pos_]) != 0) {
            v = v * 10 + (b_[pos_++] - '0');
            if (v > 1u << 20) throw FormatError(std::string("pixmap: ") + what + " too large");
        }
        return v;
    }

    std::size_t& pos() { return pos_; }

private:
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

} // namespace

ImageBuffer decode_ppm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') throw FormatError("pixmap: missing P6 magic");
    HeaderReader r(bytes);
    r.pos() = 2;
    const std::size_t w = r.number("width");
    const std::size_t h = r.number("height");
    const std::size_t maxval = r.number("maxval");
    if (w == 0 || h == 0) throw FormatError("pixmap: zero dimension");
    if (maxval != 255) throw FormatError("pixmap: maxval must be 255, got " + std::to_string(maxval));
    std::size_t& pos = r.pos();
    if (pos >= bytes.size() || std::isspace(bytes[pos]) == 0) throw FormatError("pixmap: missing header terminator");
    ++pos;
    const std::size_t need = w * h * 3;
    if (bytes.size() - pos < need)
        throw FormatError("pixmap: truncated payload, " + std::to_string(bytes.size() - pos) + " of " +
                          std::to_string(need) + " bytes");
    if (bytes.size() - pos > need) throw FormatError("pixmap: trailing bytes after payload");
    ImageBuffer img{w, h, std::vector<float>(need)};
    for (std::size_t i = 0; i < w * h; ++i)
        for (std::size_t c = 0; c < 3; ++c) img.data[c * w * h + i] = static_cast<float>(bytes[pos + i * 3 + c]) / 255.0f;
    return img;
}

ImageBuffer read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_ppm(bytes);
}

std::vector<std::uint8_t> encode_ppm(const ImageBuffer& img) {
    const std::size_t n = img.width * img.height;
    if (n == 0 || img.data.size() != 3 * n) throw DimensionError("pixmap: buffer size does not match dimensions");
    const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + 3 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 3; ++c) out.push_back(quantize(img.data[c * n + i]));
    return out;
}

void write_image(const std::string& path, const ImageBuffer& img) {
    const auto bytes = encode_ppm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace binmoire
