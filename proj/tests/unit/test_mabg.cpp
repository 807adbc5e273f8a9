// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "binmoire/error.hpp"
#include "binmoire/mabg.hpp"
#include "helpers.hpp"

using namespace binmoire;
using binmoire::testing::random_tensor;

TEST(Haar, SingleBlockBands) {
    // [[a, b], [c, d]] = [[1, 2], [3, 4]]
    const SubBands sb = haar_dwt(FloatTensor({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4}));
    EXPECT_FLOAT_EQ(sb.ll[0], 5.0f);  // (1+2+3+4)/2
    EXPECT_FLOAT_EQ(sb.lh[0], -1.0f); // (1-2+3-4)/2
    EXPECT_FLOAT_EQ(sb.hl[0], -2.0f); // (1+2-3-4)/2
    EXPECT_FLOAT_EQ(sb.hh[0], 0.0f);
}

TEST(Haar, RequiresEvenDims) {
    EXPECT_THROW(haar_dwt(FloatTensor({1, 1, 3, 2})), DimensionError);
}

TEST(Haar, DoubleRoundTripIsTight) {
    Rng r(4);
    const DoubleTensor x = random_tensor(r, {2, 3, 6, 10}).cast<double>();
    const DoubleTensor y = haar_idwt(haar_dwt(x));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-14);
}

TEST(PadToEven, ReplicatesLastRowAndColumn) {
    const FloatTensor x({1, 1, 3, 3}, std::vector<float>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    const FloatTensor p = pad_to_even(x);
    ASSERT_EQ(p.shape(), (Shape{1, 1, 4, 4}));
    EXPECT_EQ(p.at(0, 0, 3, 3), 9.0f);
    EXPECT_EQ(p.at(0, 0, 0, 3), 3.0f);
    EXPECT_EQ(p.at(0, 0, 3, 0), 7.0f);
    const FloatTensor even({1, 1, 2, 2}, 1.0f);
    EXPECT_EQ(pad_to_even(even), even);
}

TEST(Descriptors, OddInputsAreAccepted) {
    Rng r(5);
    const GateDescriptors d = gate_descriptors(random_tensor(r, {1, 2, 7, 5}));
    ASSERT_EQ(d.rows.size(), 2u);
    for (const auto& row : d.rows)
        for (double v : row) EXPECT_TRUE(std::isfinite(v));
}

TEST(Descriptors, OrderIsStatsThenFrequency) {
    // Constant plane: mu = m_abs = value, sigma = 0, r_hf = 0.
    const GateDescriptors d = gate_descriptors(FloatTensor({1, 1, 4, 4}, -0.5f));
    EXPECT_DOUBLE_EQ(d.rows[0][0], -0.5);
    EXPECT_DOUBLE_EQ(d.rows[0][1], 0.0);
    EXPECT_DOUBLE_EQ(d.rows[0][2], 0.5);
    EXPECT_NEAR(d.rows[0][3], 0.0, 1e-12);
}

TEST(Descriptors, VerticalStripesAreFullyOriented) {
    FloatTensor x({1, 1, 4, 4});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) x.at(0, 0, i, j) = j % 2 == 0 ? 1.0f : -1.0f;
    const FreqDescriptors f = freq_descriptors(subband_energies(haar_dwt(x)));
    EXPECT_NEAR(f.s_orient[0], 1.0, 1e-6);
    EXPECT_NEAR(f.r_hf[0], 1.0, 1e-6);
}

TEST(Descriptors, StatsNeedTwoElements) {
    EXPECT_THROW(stats_descriptors(FloatTensor({1, 1, 1, 1})), DimensionError);
}

TEST(Gate, ValueMatchesSigmoid) {
    GateHead h;
    h.weight = {1, -1, 0.5f, 2, 0};
    h.bias = 0.25f;
    const std::array<double, kDescriptorCount> d{0.1, 0.2, 0.3, 0.4, 0.5};
    const double z = 0.25 + 0.1 - 0.2 + 0.15 + 0.8;
    EXPECT_NEAR(gate_value(h, d), 1.0 / (1.0 + std::exp(-z)), 1e-7);
}

TEST(Gate, StaysInsideOpenInterval) {
    GateHead h;
    h.bias = 1e30f;
    EXPECT_LT(gate_value(h, {}), 1.0);
    h.bias = -1e30f;
    EXPECT_GT(gate_value(h, {}), 0.0);
    const GateVector g = predict_gate(FloatTensor({1, 2, 2, 2}, 1.0f), h);
    for (float v : g.values) EXPECT_GT(v, 0.0f);
}
