// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Oracle-equivalence and invariant suites behind `binmoire verify`.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binmoire/network.hpp"

namespace binmoire::verify {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const;
    const Check* find(const std::string& name) const;
    /// "[PASS] name: detail" per check.
    std::string text() const;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed = 1);

SuiteReport run_kernels(std::uint64_t seed = 1);
SuiteReport run_mabg(std::uint64_t seed = 1);
SuiteReport run_sgra(std::uint64_t seed = 1);
SuiteReport run_grad(std::uint64_t seed = 1);

struct GradCheckResult {
    std::size_t parameters = 0; ///< scalars in the network
    std::size_t checked = 0;
    std::size_t loose = 0;      ///< compared at the looser near-threshold tolerance
    std::size_t excluded = 0;   ///< probes straddled a kink of the graph
    double max_rel_error = 0.0;
    std::string worst;          ///< "name[index]" of the largest error
    std::size_t failures = 0;
};

/// Tiny network (2 scales, widths 2 and 4, one block per scale, 1x1 io convs)
/// with every parameter randomised.
NetworkConfig gradcheck_network_config();

/// Surrogate-mode analytic gradients of sum(R * f(x)) against central
/// differences, one probe per scalar parameter, in double precision.
GradCheckResult gradient_check(const NetworkConfig& cfg, std::uint64_t seed, double tol = 1e-4,
                               double loose_tol = 1e-3);

} // namespace binmoire::verify
