// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>

#include "binmoire/binarize.hpp"
#include "binmoire/binconv.hpp"
#include "binmoire/oracle/oracles.hpp"
#include "binmoire/simd/kernels.hpp"
#include "helpers.hpp"

using namespace binmoire;
using binmoire::testing::random_pm1;

namespace {

class IsaGuard {
public:
    IsaGuard() : saved_(simd::active().isa) {}
    ~IsaGuard() { simd::set_active(saved_); }

private:
    simd::Isa saved_;
};

} // namespace

TEST(Simd, ScalarAlwaysAvailable) {
    const auto isas = simd::available_isas();
    ASSERT_FALSE(isas.empty());
    EXPECT_EQ(isas.front(), simd::Isa::Scalar);
}

TEST(Simd, XorPopcountMatchesScalar) {
    Rng r(1);
    const auto& ref = simd::kernels_for(simd::Isa::Scalar);
    for (simd::Isa isa : simd::available_isas()) {
        const auto& k = simd::kernels_for(isa);
        for (std::size_t words : {1u, 2u, 3u, 4u, 5u, 8u, 9u, 17u}) {
            for (std::size_t nf : {1u, 3u, 8u}) {
                std::vector<std::uint64_t> patch(words), filters(words * nf);
                for (auto& v : patch) v = r.bits();
                for (auto& v : filters) v = r.bits();
                std::vector<std::int32_t> a(nf), b(nf);
                ref.xor_popcount_rows(patch.data(), filters.data(), words, nf, a.data());
                k.xor_popcount_rows(patch.data(), filters.data(), words, nf, b.data());
                EXPECT_EQ(a, b) << simd::isa_name(isa) << " words=" << words;
            }
        }
    }
}

TEST(Simd, AxpyAndDotMatchScalar) {
    Rng r(2);
    const auto& ref = simd::kernels_for(simd::Isa::Scalar);
    for (simd::Isa isa : simd::available_isas()) {
        const auto& k = simd::kernels_for(isa);
        for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 31u, 64u, 100u}) {
            std::vector<float> x(n), y(n);
            // Small integers keep sums exact regardless of association order.
            for (auto& v : x) v = static_cast<float>(r.integer(-8, 8));
            for (auto& v : y) v = static_cast<float>(r.integer(-8, 8));
            std::vector<float> y1 = y, y2 = y;
            ref.axpy(3.0f, x.data(), y1.data(), n);
            k.axpy(3.0f, x.data(), y2.data(), n);
            EXPECT_EQ(y1, y2) << simd::isa_name(isa);
            EXPECT_EQ(ref.dot(x.data(), y.data(), n), k.dot(x.data(), y.data(), n)) << simd::isa_name(isa);
        }
    }
}

TEST(Simd, ConvIdenticalUnderEveryIsa) {
    IsaGuard guard;
    Rng r(3);
    const ConvSpec spec{37, 5, 3, 1, 1};
    const FloatTensor x = random_pm1(r, {2, 37, 9, 70}), w = random_pm1(r, spec.weight_shape());
    const FloatTensor ref = oracle::naive_pm1_conv(x, w, spec);
    for (simd::Isa isa : simd::available_isas()) {
        simd::set_active(isa);
        EXPECT_EQ(xnor_conv2d(pack(x, PackAxis::Width), pack(w, PackAxis::Filter), spec), ref)
            << simd::isa_name(isa);
    }
}

TEST(Simd, FaultInjectionBreaksExactness) {
    Rng r(4);
    const ConvSpec spec{4, 2, 3, 1, 1};
    const FloatTensor x = random_pm1(r, {1, 4, 6, 6}), w = random_pm1(r, spec.weight_shape());
    simd::set_fault_injection(true);
    const FloatTensor faulty = xnor_conv2d(pack(x, PackAxis::Width), pack(w, PackAxis::Filter), spec);
    simd::set_fault_injection(false);
    EXPECT_NE(faulty, oracle::naive_pm1_conv(x, w, spec));
    EXPECT_EQ(xnor_conv2d(pack(x, PackAxis::Width), pack(w, PackAxis::Filter), spec),
              oracle::naive_pm1_conv(x, w, spec));
}
