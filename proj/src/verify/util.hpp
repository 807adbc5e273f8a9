// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "binmoire/rng.hpp"
#include "binmoire/tensor.hpp"
#include "binmoire/verify.hpp"

namespace binmoire::verify::detail {

inline FloatTensor random_tensor(Rng& r, Shape s, double lo = -1.0, double hi = 1.0) {
    FloatTensor t(s);
    for (float& v : t.data()) v = static_cast<float>(r.uniform(lo, hi));
    return t;
}

inline FloatTensor random_pm1(Rng& r, Shape s) {
    FloatTensor t(s);
    for (float& v : t.data()) v = (r.bits() & 1u) != 0 ? 1.0f : -1.0f;
    return t;
}

inline Shape random_shape(Rng& r, std::size_t max_n, std::size_t max_c, std::size_t max_hw) {
    return {static_cast<std::size_t>(r.integer(1, static_cast<std::int64_t>(max_n))),
            static_cast<std::size_t>(r.integer(1, static_cast<std::int64_t>(max_c))),
            static_cast<std::size_t>(r.integer(1, static_cast<std::int64_t>(max_hw))),
            static_cast<std::size_t>(r.integer(1, static_cast<std::int64_t>(max_hw)))};
}

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline std::string count_detail(std::size_t ok, std::size_t total, const char* what) {
    return std::to_string(ok) + "/" + std::to_string(total) + " " + what;
}

inline void add(SuiteReport& r, std::string name, bool ok, std::string detail) {
    r.checks.push_back({std::move(name), ok, std::move(detail)});
}

} // namespace binmoire::verify::detail
