// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "binmoire/cost.hpp"
#include "binmoire/error.hpp"

using namespace binmoire;

namespace {

const CostRow* find_row(const CostReport& r, const std::string& name) {
    for (const auto& row : r.rows)
        if (row.name == name) return &row;
    return nullptr;
}

} // namespace

TEST(Cost, WorkedBinaryLayer) {
    const CostRow r = conv_cost("layer", {64, 64, 3, 1, 1}, 64, 64, true);
    EXPECT_EQ(r.params_f, 36864u);
    EXPECT_EQ(r.ops_f, 150994944u);
    EXPECT_EQ(r.ops_b, 2359296.0);
    EXPECT_EQ(r.params_b, 1152.0);
}

TEST(Cost, FullPrecisionRowHasNoBinaryShare) {
    const CostRow r = conv_cost("head", {3, 16, 3, 1, 1}, 8, 8, false);
    EXPECT_EQ(r.params_b, 0.0);
    EXPECT_EQ(r.ops(), static_cast<double>(r.ops_f));
}

TEST(Cost, DefaultConfigRules) {
    const CostReport rep = count_params_ops(build_network(NetworkConfig{}, 0));
    std::size_t binarized = 0;
    for (const auto& row : rep.rows) {
        if (!row.binarized) continue;
        ++binarized;
        EXPECT_EQ(row.params_b, static_cast<double>(row.params_f) / 32.0) << row.name;
        EXPECT_EQ(row.ops_b, static_cast<double>(row.ops_f) / 64.0) << row.name;
    }
    EXPECT_EQ(binarized, 6u);
    EXPECT_NE(find_row(rep, "head"), nullptr);
    EXPECT_FALSE(find_row(rep, "head")->binarized);
    // enc0.b0 at 256x256: 16*16*9 weights per output position.
    EXPECT_EQ(find_row(rep, "enc0.b0.conv")->ops_f, 2304ull * 256 * 256);
    EXPECT_EQ(find_row(rep, "down0.conv")->ops_f, 16ull * 32 * 9 * 128 * 128);
    EXPECT_EQ(find_row(rep, "up0.conv")->ops_f, 32ull * 16 * 9 * 256 * 256);
    EXPECT_EQ(find_row(rep, "enc0.b0.mabg")->params_f, 6u);
    EXPECT_DOUBLE_EQ(rep.params(), rep.params_b() + rep.params_f());
}

TEST(Cost, AdapterCountedFullPrecision) {
    NetworkConfig c;
    c.channels = {64, 32};
    const CostReport rep = count_params_ops(build_network(c, 0));
    const CostRow* row = find_row(rep, "down0.sgra");
    ASSERT_NE(row, nullptr);
    EXPECT_FALSE(row->binarized);
    EXPECT_EQ(row->params_f, 64u);
}

TEST(Cost, AdapterParamsGrowAsGroupsShrink) {
    std::uint64_t prev = 0;
    for (std::size_t d : {1u, 2u, 4u, 8u}) {
        NetworkConfig c;
        c.group_divisor = d;
        const CostReport rep = count_params_ops(build_network(c, 0));
        const std::uint64_t p = find_row(rep, "down0.sgra")->params_f + find_row(rep, "up0.sgra")->params_f;
        EXPECT_GT(p, prev);
        prev = p;
    }
}

TEST(Cost, RecordsEndWithTotal) {
    const CostReport rep = count_params_ops(build_network(NetworkConfig{}, 0), 64, 64);
    const std::string rec = rep.records();
    EXPECT_NE(rec.find("\"total\""), std::string::npos);
    EXPECT_THROW(count_params_ops(build_network(NetworkConfig{}, 0), 0, 4), ConfigError);
}
