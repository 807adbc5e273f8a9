// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "binmoire/binarize.hpp"
#include "binmoire/binconv.hpp"
#include "binmoire/error.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "binmoire/parallel.hpp"
#include "helpers.hpp"

using namespace binmoire;
using binmoire::testing::random_pm1;
using binmoire::testing::random_tensor;

namespace {

FloatTensor xnor(const FloatTensor& x, const FloatTensor& w, const ConvSpec& spec) {
    return xnor_conv2d(pack(x, PackAxis::Width), pack(w, PackAxis::Filter), spec);
}

} // namespace

TEST(ConvSpec, OutputShape) {
    const ConvSpec s{3, 8, 3, 2, 1};
    EXPECT_EQ(s.output_shape({1, 3, 9, 8}), (Shape{1, 8, 5, 4}));
    EXPECT_THROW((void)s.output_shape({1, 4, 9, 8}), DimensionError);
    EXPECT_THROW((void)(ConvSpec{1, 1, 5, 1, 0}).output_shape({1, 1, 3, 3}), DimensionError);
}

TEST(XnorConv, SingleWindowCount) {
    // N = 4 positions, 3 agree and 1 disagrees -> 4 - 2 = 2.
    const FloatTensor x({1, 1, 2, 2}, std::vector<float>{1, -1, 1, 1});
    const FloatTensor w({1, 1, 2, 2}, std::vector<float>{1, -1, 1, -1});
    const FloatTensor y = xnor(x, w, {1, 1, 2, 1, 0});
    ASSERT_EQ(y.size(), 1u);
    EXPECT_EQ(y[0], 2.0f);
}

TEST(XnorConv, PaddingIsMinusOne) {
    // All +1 input, all +1 3x3 filter: a corner sees 4 inside (+1) and 5 padded (-1).
    const FloatTensor x({1, 1, 3, 3}, 1.0f);
    const FloatTensor w({1, 1, 3, 3}, 1.0f);
    const FloatTensor y = xnor(x, w, {1, 1, 3, 1, 1});
    EXPECT_EQ(y.at(0, 0, 0, 0), -1.0f);
    EXPECT_EQ(y.at(0, 0, 1, 1), 9.0f);
    EXPECT_EQ(y.at(0, 0, 0, 1), 3.0f);
}

class XnorOracle : public ::testing::TestWithParam<int> {};

TEST_P(XnorOracle, MatchesNaiveConvExactly) {
    Rng r(1000 + static_cast<std::uint64_t>(GetParam()));
    const std::size_t k = static_cast<std::size_t>(2 * r.integer(0, 2) + 1);
    const ConvSpec spec{static_cast<std::size_t>(r.integer(1, 9)), static_cast<std::size_t>(r.integer(1, 6)), k,
                        static_cast<std::size_t>(r.integer(1, 3)), static_cast<std::size_t>(r.integer(0, 2))};
    const Shape xs{static_cast<std::size_t>(r.integer(1, 2)), spec.in_channels,
                   static_cast<std::size_t>(r.integer(static_cast<std::int64_t>(k), 12)),
                   static_cast<std::size_t>(r.integer(static_cast<std::int64_t>(k), 80))};
    const FloatTensor x = random_pm1(r, xs), w = random_pm1(r, spec.weight_shape());
    EXPECT_EQ(xnor(x, w, spec), oracle::naive_pm1_conv(x, w, spec));
}

INSTANTIATE_TEST_SUITE_P(Random, XnorOracle, ::testing::Range(0, 40));

TEST(XnorConv, RejectsWrongPackAxes) {
    const FloatTensor x({1, 1, 3, 3}, 1.0f);
    const ConvSpec spec{1, 1, 3, 1, 1};
    EXPECT_THROW(xnor_conv2d(pack(x, PackAxis::Filter), pack(x, PackAxis::Filter), spec), DimensionError);
    EXPECT_THROW(xnor_conv2d(pack(x, PackAxis::Width), pack(x, PackAxis::Width), spec), DimensionError);
}

TEST(GatedConv, MatchesPerChannelOracle) {
    Rng r(77);
    for (int i = 0; i < 20; ++i) {
        const ConvSpec spec{static_cast<std::size_t>(r.integer(1, 6)), static_cast<std::size_t>(r.integer(1, 5)), 3,
                            static_cast<std::size_t>(r.integer(1, 2)), 1};
        const Shape xs{2, spec.in_channels, 9, 11};
        const FloatTensor x = random_tensor(r, xs), w = random_tensor(r, spec.weight_shape());
        ThresholdVector t{std::vector<float>(spec.in_channels)};
        for (float& v : t.values) v = static_cast<float>(r.uniform(-0.2, 0.2));
        GateVector beta = GateVector::uniform(2, spec.in_channels, 1.0f);
        for (float& v : beta.values) v = static_cast<float>(r.uniform(0.01, 1.0));
        const FloatTensor y = gated_binary_conv(x, w, t, beta, spec);
        const DoubleTensor ref = oracle::gated_conv_reference(x, w, t.values, beta, spec);
        for (std::size_t j = 0; j < y.size(); ++j)
            EXPECT_LE(std::fabs(y[j] - ref[j]), 1e-6 * std::max(1.0, std::fabs(ref[j])));
    }
}

TEST(GatedConv, LiteralEqualsPackedForUniformGate) {
    Rng r(78);
    const ConvSpec spec{5, 4, 3, 1, 1};
    const FloatTensor x = random_tensor(r, {2, 5, 8, 8}), w = random_tensor(r, spec.weight_shape());
    const ThresholdVector t = ThresholdVector::zeros(5);
    GateVector beta = GateVector::uniform(2, 5, 1.0f);
    EXPECT_EQ(gated_binary_conv(x, w, t, beta, spec, GatedPath::Literal),
              gated_binary_conv(x, w, t, beta, spec, GatedPath::Packed));
    for (std::size_t c = 0; c < 5; ++c) beta.values[5 + c] = 0.25f;
    EXPECT_TRUE(beta.uniform_per_sample());
    EXPECT_EQ(gated_binary_conv(x, w, t, beta, spec, GatedPath::Literal),
              gated_binary_conv(x, w, t, beta, spec, GatedPath::Packed));
}

TEST(GatedConv, GateValidation) {
    const ConvSpec spec{2, 1, 1, 1, 0};
    const FloatTensor x({1, 2, 2, 2}, 1.0f), w({1, 2, 1, 1}, 1.0f);
    const ThresholdVector t = ThresholdVector::zeros(2);
    EXPECT_THROW(gated_binary_conv(x, w, t, GateVector::uniform(1, 2, 0.0f), spec), DomainError);
    EXPECT_THROW(gated_binary_conv(x, w, t, GateVector::uniform(1, 2, 1.5f), spec), DomainError);
    EXPECT_THROW(gated_binary_conv(x, w, t, GateVector::uniform(1, 3, 0.5f), spec), DimensionError);
    GateVector mixed{1, 2, {0.5f, 0.25f}};
    EXPECT_THROW(gated_binary_conv(x, w, t, mixed, spec, GatedPath::Packed), DomainError);
    EXPECT_NO_THROW(gated_binary_conv(x, w, t, mixed, spec, GatedPath::Literal));
}

TEST(GatedConv, HandComputedValue) {
    // Two channels, 1x1 filter: alpha = (|2| + |-1|) / 2 = 1.5.
    const ConvSpec spec{2, 1, 1, 1, 0};
    const FloatTensor x({1, 2, 1, 1}, std::vector<float>{0.3f, -0.7f});
    const FloatTensor w({1, 2, 1, 1}, std::vector<float>{2.0f, -1.0f});
    const GateVector beta{1, 2, {0.5f, 0.25f}};
    const FloatTensor y = gated_binary_conv(x, w, ThresholdVector::zeros(2), beta, spec);
    // 1.5 * (0.5 * (+1)(+1) + 0.25 * (-1)(-1)) = 1.125
    EXPECT_FLOAT_EQ(y[0], 1.125f);
}

TEST(Rprelu, PiecewiseAndKnee) {
    const RpreluParams p{{0.5f}, {0.1f}, {0.25f}};
    const FloatTensor x({1, 1, 1, 3}, std::vector<float>{1.5f, 0.5f, -0.5f});
    const FloatTensor y = rprelu(x, p);
    EXPECT_FLOAT_EQ(y[0], 1.1f);
    EXPECT_FLOAT_EQ(y[1], 0.1f);
    EXPECT_FLOAT_EQ(y[2], 0.25f * -1.0f + 0.1f);
    EXPECT_EQ(rprelu(x, RpreluParams::identity(1)), x);
    EXPECT_THROW(rprelu(x, RpreluParams::identity(2)), DimensionError);
}

TEST(Parallel, ThreadCountDoesNotChangeResults) {
    Rng r(90);
    const ConvSpec spec{16, 8, 3, 1, 1};
    const FloatTensor x = random_tensor(r, {2, 16, 20, 20}), w = random_tensor(r, spec.weight_shape());
    GateVector beta = GateVector::uniform(2, 16, 1.0f);
    for (float& v : beta.values) v = static_cast<float>(r.uniform(0.1, 1.0));
    set_thread_count(1);
    const FloatTensor a = gated_binary_conv(x, w, ThresholdVector::zeros(16), beta, spec);
    set_thread_count(3);
    const FloatTensor b = gated_binary_conv(x, w, ThresholdVector::zeros(16), beta, spec);
    set_thread_count(0);
    EXPECT_EQ(a, b);
}

TEST(Parallel, CoversRangeOnce) {
    set_thread_count(4);
    std::vector<int> hits(1001, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    set_thread_count(0);
    for (int h : hits) EXPECT_EQ(h, 1);
}
