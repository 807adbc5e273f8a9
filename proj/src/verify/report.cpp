// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <stdexcept>

#include "binmoire/verify.hpp"

namespace binmoire::verify {

bool SuiteReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

const Check* SuiteReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string SuiteReport::text() const {
    std::string out;
    for (const auto& c : checks) out += std::string(c.passed ? "[PASS] " : "[FAIL] ") + c.name + ": " + c.detail + "\n";
    return out;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"kernels", "mabg", "sgra", "grad"};
    return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport r;
    if (name == "kernels")
        r = run_kernels(seed);
    else if (name == "mabg")
        r = run_mabg(seed);
    else if (name == "sgra")
        r = run_sgra(seed);
    else if (name == "grad")
        r = run_grad(seed);
    else
        throw std::invalid_argument("unknown suite '" + name + "'");
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace binmoire::verify
