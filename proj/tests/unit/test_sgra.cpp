// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "binmoire/error.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "binmoire/sgra.hpp"
#include "helpers.hpp"

using namespace binmoire;
using binmoire::testing::random_tensor;

TEST(ChooseGroups, Examples) {
    EXPECT_EQ(choose_groups(64, 32), 32u);
    EXPECT_EQ(choose_groups(48, 36), 12u);
    EXPECT_EQ(choose_groups(16, 16), 16u);
    EXPECT_EQ(choose_groups(64, 32, 4), 8u);
    EXPECT_THROW(choose_groups(64, 32, 3), ConfigError);
    EXPECT_THROW(choose_groups(0, 32), ConfigError);
}

TEST(Interleave, SixChannelsTwoGroups) {
    EXPECT_EQ(InterleavePerm(6, 2).sources(), (std::vector<std::size_t>{0, 3, 1, 4, 2, 5}));
    EXPECT_EQ(InterleavePerm(6, 3).sources(), (std::vector<std::size_t>{0, 2, 4, 1, 3, 5}));
    EXPECT_THROW(InterleavePerm(6, 4), DimensionError);
}

TEST(Interleave, MovesWholePlanes) {
    FloatTensor u({1, 4, 1, 2});
    for (std::size_t c = 0; c < 4; ++c) u.at(0, c, 0, 0) = u.at(0, c, 0, 1) = static_cast<float>(c);
    const FloatTensor y = interleave(u, 2);
    const float want[4] = {0, 2, 1, 3};
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(y.at(0, c, 0, 1), want[c]);
}

TEST(PartitionProject, DenseWhenOneGroup) {
    Rng r(2);
    const SgraGeometry g{3, 2, 1, 1, false};
    const SgraParams p = SgraParams::init(g, 5);
    const FloatTensor x = random_tensor(r, {1, 3, 2, 2});
    const FloatTensor u = partition_project(x, p);
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 0; i < 4; ++i) {
            double want = 0.0;
            for (std::size_t c = 0; c < 3; ++c) want += static_cast<double>(p.weight(0, o, c)) * x.raw()[c * 4 + i];
            EXPECT_NEAR(u.raw()[o * 4 + i], want, 1e-6);
        }
}

TEST(PartitionProject, StrideSamplesTopLeft) {
    FloatTensor x({1, 1, 4, 5});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(i);
    const SgraParams p{false, {1, 1, 1, 2, false}, {1.0f}};
    const FloatTensor u = partition_project(x, p);
    ASSERT_EQ(u.shape(), (Shape{1, 1, 2, 3}));
    EXPECT_EQ(u.at(0, 0, 1, 2), x.at(0, 0, 2, 4));
}

TEST(PartitionProject, WeightCountChecked) {
    const SgraParams p{false, {4, 2, 2, 1, false}, {1.0f, 2.0f}};
    EXPECT_THROW(partition_project(FloatTensor({1, 4, 2, 2}), p), DimensionError);
}

TEST(PartitionProject, InitBoundsAndCount) {
    const SgraGeometry g{64, 32, 32, 2, false};
    const SgraParams p = SgraParams::init(g, 1);
    EXPECT_EQ(p.weights.size(), 64u);
    const double bound = 1.0 / std::sqrt(2.0);
    for (float w : p.weights) EXPECT_LE(std::fabs(w), bound);
    EXPECT_EQ(SgraParams::init(g, 1).weights, p.weights);
    EXPECT_NE(SgraParams::init(g, 2).weights, p.weights);
}

TEST(Upsample, BackwardIsAdjoint) {
    Rng r(3);
    const DoubleTensor x = random_tensor(r, {1, 2, 3, 4}).cast<double>();
    const DoubleTensor g = random_tensor(r, {1, 2, 6, 8}).cast<double>();
    const DoubleTensor ux = upsample_nearest2x(x), bg = upsample_nearest2x_backward(g);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < ux.size(); ++i) lhs += ux[i] * g[i];
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * bg[i];
    EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(ProjectBackward, MatchesFiniteDifferences) {
    Rng r(6);
    const SgraGeometry g{4, 6, 2, 2, false};
    std::vector<double> w(g.weight_count());
    for (double& v : w) v = r.uniform(-1, 1);
    const DoubleTensor x = random_tensor(r, {2, 4, 5, 5}).cast<double>();
    const Shape os = g.output_shape(x.shape());
    const DoubleTensor gu = random_tensor(r, os).cast<double>();
    DoubleTensor gx;
    std::vector<double> gw;
    partition_project_backward(x, std::span<const double>(w), g, gu, &gx, &gw);
    auto loss = [&](const DoubleTensor& xx, const std::vector<double>& ww) {
        const DoubleTensor u = partition_project(xx, std::span<const double>(ww), g);
        double l = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) l += u[i] * gu[i];
        return l;
    };
    const double h = 1e-6;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        EXPECT_NEAR(gw[i], (loss(x, wp) - loss(x, wm)) / (2 * h), 1e-7);
    }
    for (std::size_t i = 0; i < x.size(); i += 7) {
        DoubleTensor xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        EXPECT_NEAR(gx[i], (loss(xp, w) - loss(xm, w)) / (2 * h), 1e-7);
    }
}

TEST(SgraForward, IdentityIsBitExact) {
    Rng r(7);
    const FloatTensor x = random_tensor(r, {1, 3, 4, 4});
    EXPECT_EQ(sgra_forward(x, SgraParams::make_identity(), x.shape()), x);
    EXPECT_THROW(sgra_forward(x, SgraParams::make_identity(), {1, 6, 4, 4}), ConfigError);
}

TEST(DistributionReport, RecordsAreJsonLines) {
    Rng r(8);
    const FloatTensor u = random_tensor(r, {1, 4, 3, 3});
    const std::string rec = to_records(group_distribution_report(u, interleave(u, 2), 2, 4));
    std::size_t lines = 0;
    for (char c : rec) lines += c == '\n';
    EXPECT_EQ(lines, 4u);
    EXPECT_NE(rec.find("\"stage\":\"before\""), std::string::npos);
    EXPECT_THROW(group_distribution_report(u, u, 2, 1), ConfigError);
}
