// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace binmoire {

/// Worker cap: BINMOIRE_THREADS when set to a positive integer, else the
/// hardware concurrency.
std::size_t thread_count();

/// Override for tests; 0 restores the environment/hardware default.
void set_thread_count(std::size_t n);

/// Split [0, n) into contiguous chunks and run `body(begin, end)` on each.
/// Every index is processed by exactly one call and writes only its own
/// outputs, so results are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace binmoire
