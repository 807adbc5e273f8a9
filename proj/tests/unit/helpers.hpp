// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "binmoire/rng.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire::testing {

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

} // namespace binmoire::testing
