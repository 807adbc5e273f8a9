// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "binmoire/error.hpp"
#include "binmoire/image.hpp"
#include "binmoire/metrics.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "helpers.hpp"

using namespace binmoire;
using binmoire::testing::random_tensor;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

} // namespace

TEST(Psnr, KnownValueAndIdentity) {
    const FloatTensor a({1, 1, 1, 4}, 0.5f);
    FloatTensor b = a;
    EXPECT_TRUE(std::isinf(psnr(a, b)));
    b[0] = 0.6f;
    // MSE = 0.01 / 4
    EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(400.0), 1e-4);
}

TEST(Psnr, SymmetricAndMatchesLoop) {
    Rng r(1);
    const FloatTensor a = random_tensor(r, {1, 3, 9, 9}, 0, 1), b = random_tensor(r, {1, 3, 9, 9}, 0, 1);
    EXPECT_EQ(psnr(a, b), psnr(b, a));
    EXPECT_NEAR(psnr(a, b), oracle::psnr_loop(a, b, 1.0), 1e-9);
}

TEST(Psnr, DecreasesWithNoise) {
    Rng r(2);
    const FloatTensor clean = random_tensor(r, {1, 3, 16, 16}, 0.2, 0.8);
    FloatTensor unit = random_tensor(r, clean.shape());
    double prev = std::numeric_limits<double>::infinity();
    for (double amp : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        FloatTensor noisy = clean;
        for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += static_cast<float>(amp) * unit[i];
        const double p = psnr(noisy, clean);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(Ssim, IdentitySymmetryAndLoop) {
    Rng r(3);
    const FloatTensor a = random_tensor(r, {1, 3, 20, 17}, 0, 1), b = random_tensor(r, {1, 3, 20, 17}, 0, 1);
    EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
    EXPECT_EQ(ssim(a, b), ssim(b, a));
    EXPECT_NEAR(ssim(a, b), oracle::ssim_loop(a, b, 8, 1.0), 1e-9);
    EXPECT_LT(ssim(a, b), 0.5);
}

TEST(Clamp01, Clamps) {
    const FloatTensor x({1, 1, 1, 3}, std::vector<float>{-1, 0.5f, 2});
    EXPECT_EQ(clamp01(x), FloatTensor({1, 1, 1, 3}, std::vector<float>{0, 0.5f, 1}));
}

TEST(Ppm, SingleWhitePixel) {
    const ImageBuffer img = decode_ppm(bytes_of(std::string("P6\n1 1\n255\n") + "\xff\xff\xff"));
    EXPECT_EQ(img.width, 1u);
    EXPECT_EQ(img.height, 1u);
    EXPECT_EQ(img.data, (std::vector<float>{1, 1, 1}));
}

TEST(Ppm, HeaderCommentsAndCanonicalRewrite) {
    const std::string body = "\x10\x20\x30\x40\x50\x60";
    const ImageBuffer img = decode_ppm(bytes_of("P6 # comment\n2 1 # more\n255\n" + body));
    EXPECT_EQ(encode_ppm(img), bytes_of("P6\n2 1\n255\n" + body));
}

TEST(Ppm, QuantizationRule) {
    EXPECT_EQ(quantize(0.5f), 128);
    EXPECT_EQ(quantize(-0.2f), 0);
    EXPECT_EQ(quantize(1.7f), 255);
    EXPECT_EQ(quantize(1.0f / 255.0f), 1);
}

TEST(Ppm, RoundTripIsByteExact) {
    Rng r(4);
    std::vector<std::uint8_t> file = bytes_of("P6\n5 3\n255\n");
    for (int i = 0; i < 45; ++i) file.push_back(static_cast<std::uint8_t>(r.integer(0, 255)));
    EXPECT_EQ(encode_ppm(decode_ppm(file)), file);
    const ImageBuffer img = decode_ppm(file);
    EXPECT_EQ(encode_ppm(ImageBuffer::from_tensor(img.to_tensor())), file);
}

TEST(Ppm, MalformedInputs) {
    EXPECT_THROW(decode_ppm(bytes_of("P5\n1 1\n255\n\x01")), FormatError);
    EXPECT_THROW(decode_ppm(bytes_of("P6\n1 1\n65535\n\x01\x01\x01\x01\x01\x01")), FormatError);
    EXPECT_THROW(decode_ppm(bytes_of("P6\n2 1\n255\n\x01\x02\x03")), FormatError);
    EXPECT_THROW(decode_ppm(bytes_of("P6\n1 1\n255\n\x01\x02\x03\x04")), FormatError);
    EXPECT_THROW(decode_ppm(bytes_of("P6\nx 1\n255\n")), FormatError);
    EXPECT_THROW(read_image("/nonexistent/dir/none.ppm"), IoError);
}

TEST(Ppm, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "binmoire_ppm_test.ppm";
    Rng r(5);
    const FloatTensor t = random_tensor(r, {1, 3, 4, 6}, 0, 1);
    write_image(path.string(), ImageBuffer::from_tensor(t));
    const ImageBuffer back = read_image(path.string());
    EXPECT_EQ(back.width, 6u);
    EXPECT_EQ(back.height, 4u);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(back.data[i], t[i], 0.5 / 255.0 + 1e-6);
    std::filesystem::remove(path);
}
