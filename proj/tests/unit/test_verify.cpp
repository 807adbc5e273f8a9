// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <stdexcept>

#include "binmoire/simd/kernels.hpp"
#include "binmoire/verify.hpp"

using namespace binmoire;

class Suites : public ::testing::TestWithParam<std::string> {};

TEST_P(Suites, PassOnCorrectBuild) {
    const verify::SuiteReport r = verify::run_suite(GetParam());
    EXPECT_TRUE(r.passed()) << r.text();
    EXPECT_FALSE(r.checks.empty());
}

INSTANTIATE_TEST_SUITE_P(All, Suites, ::testing::Values("kernels", "mabg", "sgra", "grad"));

TEST(Verify, UnknownSuiteThrows) { EXPECT_THROW(verify::run_suite("bogus"), std::invalid_argument); }

TEST(Verify, KernelDetailLine) {
    const verify::SuiteReport r = verify::run_kernels();
    const verify::Check* c = r.find("xnor_conv2d");
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->detail, "200/200 exact");
    EXPECT_NE(r.text().find("[PASS] xnor_conv2d: 200/200 exact"), std::string::npos);
}

TEST(Verify, FaultInjectionFailsKernels) {
    simd::set_fault_injection(true);
    const verify::SuiteReport r = verify::run_kernels();
    simd::set_fault_injection(false);
    EXPECT_FALSE(r.passed());
    EXPECT_FALSE(r.find("xnor_conv2d")->passed);
}
