// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. Exit 1 if any fails.
// Writes the training logs and a JSON-lines summary next to the binary
// (or under the directory given as argv[1]).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "binmoire/bench.hpp"
#include "binmoire/checkpoint.hpp"
#include "binmoire/cost.hpp"
#include "binmoire/train.hpp"
#include "binmoire/verify.hpp"

using namespace binmoire;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    std::string name;
    bool passed;
    std::string detail;
};

std::vector<Outcome> g_outcomes;
std::ofstream g_summary;

void report(const std::string& name, bool passed, const std::string& detail, nlohmann::json extra = {}) {
    std::printf("[%s] %s: %s\n", passed ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    g_outcomes.push_back({name, passed, detail});
    extra["criterion"] = name;
    extra["passed"] = passed;
    extra["detail"] = detail;
    g_summary << extra.dump() << '\n';
    g_summary.flush();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

const verify::Check* check_of(const verify::SuiteReport& r, const char* name) { return r.find(name); }

std::string failed_checks(const verify::SuiteReport& r) {
    std::string s;
    for (const auto& c : r.checks)
        if (!c.passed) s += (s.empty() ? "" : ", ") + c.name;
    return s;
}

void kernels_and_gated() {
    const verify::SuiteReport r = verify::run_suite("kernels");
    const verify::Check* x = check_of(r, "xnor_conv2d");
    const bool kx = x != nullptr && x->passed && r.seconds < 30.0;
    report("kernel_exactness", kx, (x ? x->detail : "missing") + fmt(", suite runtime %.2f s (< 30 s)", r.seconds),
           {{"seconds", r.seconds}});

    const verify::Check* f = check_of(r, "gated_conv_fidelity");
    const verify::Check* p = check_of(r, "gated_conv_paths");
    const bool g = f != nullptr && p != nullptr && f->passed && p->passed;
    report("gated_conv_fidelity", g, (f ? f->detail : "missing") + "; " + (p ? p->detail : "missing"));
}

void suite(const char* criterion, const char* name) {
    const verify::SuiteReport r = verify::run_suite(name);
    const std::size_t ok = static_cast<std::size_t>(
        std::count_if(r.checks.begin(), r.checks.end(), [](const verify::Check& c) { return c.passed; }));
    std::string detail = std::to_string(ok) + "/" + std::to_string(r.checks.size()) + " checks passed";
    if (!r.passed()) detail += " (failed: " + failed_checks(r) + ")";
    report(criterion, r.passed(), detail);
}

void accounting() {
    const CostReport rep = count_params_ops(build_network(NetworkConfig{}, 0));
    std::size_t rows = 0, exact = 0;
    for (const auto& row : rep.rows) {
        if (!row.binarized) continue;
        ++rows;
        exact += row.params_b == static_cast<double>(row.params_f) / 32.0 &&
                 row.ops_b == static_cast<double>(row.ops_f) / 64.0 && row.params_f % 32 == 0 && row.ops_f % 64 == 0;
    }
    const CostRow worked = conv_cost("worked", {64, 64, 3, 1, 1}, 64, 64, true);
    const bool ok = rows > 0 && exact == rows && worked.ops_b == 2359296.0;
    report("accounting", ok,
           std::to_string(exact) + "/" + std::to_string(rows) +
               " binarized rows exact; 3x3 64->64 at 64x64 gives OPs^b = " + fmt("%.0f", worked.ops_b),
           {{"params", rep.params()}, {"ops", rep.ops()}});
}

void gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    const verify::GradCheckResult g = verify::gradient_check(verify::gradcheck_network_config(), 1);
    const double secs = seconds_since(t0);
    const bool ok = g.failures == 0 && g.parameters <= 500 && g.checked > 0 && secs < 120.0;
    report("gradient_checks", ok,
           std::to_string(g.checked) + "/" + std::to_string(g.parameters) + " params checked, " +
               std::to_string(g.excluded) + " excluded, " + std::to_string(g.loose) + " loose, " +
               std::to_string(g.failures) + " failures" + fmt(", max rel %.2e", g.max_rel_error) +
               fmt(", %.2f s (< 120 s)", secs),
           {{"max_rel_error", g.max_rel_error}, {"seconds", secs}});
}

struct Run {
    TrainResult result;
    double seconds;
    std::string log;
    std::vector<std::uint8_t> ckpt;
};

Run train(const NetworkConfig& net, const TrainConfig& cfg, const fs::path& out, const std::string& tag) {
    const auto t0 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "training %s (%zu steps)...\n", tag.c_str(), cfg.steps);
    TrainResult r = train_loop(net, cfg, [&](const StepRecord& rec) {
        if (rec.step % 250 == 0) std::fprintf(stderr, "  %s step %zu loss %.5f\n", tag.c_str(), rec.step, rec.loss);
    });
    const double secs = seconds_since(t0);
    Run run{std::move(r), secs, {}, {}};
    run.log = run.result.log();
    run.ckpt = serialize_checkpoint(run.result.net);
    std::ofstream(out / (tag + ".metrics.jsonl"), std::ios::binary) << run.log;
    save_checkpoint(run.result.net, (out / (tag + ".ckpt")).string());
    return run;
}

void training(const fs::path& out) {
    const NetworkConfig full;
    const TrainConfig cfg;
    const Run a = train(full, cfg, out, "toy_mabg_sgra");
    const HeldoutReport h = evaluate_heldout(a.result.net, cfg.heldout_seed, cfg.heldout_pairs, cfg.crop);
    const double gain = h.psnr_out - h.psnr_in;

    NetworkConfig base;
    base.use_mabg = false;
    base.use_sgra = false;
    const Run b = train(base, cfg, out, "toy_baseline");
    const double lf = a.result.final_loss(), lb = b.result.final_loss();
    const double margin = (lb - lf) / lb; // >= 0: full config no worse
    const bool soft_ok = margin >= -0.05;
    const bool ok = gain >= 1.0 && a.seconds < 900.0 && soft_ok;
    report("toy_training", ok,
           fmt("held-out psnr_in %.3f dB", h.psnr_in) + fmt(" -> psnr_out %.3f dB", h.psnr_out) +
               fmt(" (gain %+.3f dB, >= 1.0)", gain) + fmt(" over %.0f pairs", static_cast<double>(h.pairs)) +
               fmt(", %.0f s (< 900 s)", a.seconds) + fmt("; final loss MABG+SGRA %.6f", lf) +
               fmt(" vs baseline %.6f", lb) + fmt(" (margin %+.2f%%, floor -5%%)", 100.0 * margin),
           {{"psnr_in", h.psnr_in},
            {"psnr_out", h.psnr_out},
            {"ssim_in", h.ssim_in},
            {"ssim_out", h.ssim_out},
            {"seconds", a.seconds},
            {"final_loss_full", lf},
            {"final_loss_baseline", lb},
            {"baseline_seconds", b.seconds}});

    const Run again = train(full, cfg, out, "toy_mabg_sgra_repeat");
    const bool same_log = again.log == a.log;
    const bool same_ckpt = again.ckpt == a.ckpt;
    report("determinism", same_log && same_ckpt,
           std::string("metric logs ") + (same_log ? "byte-identical" : "DIFFER") + " (" +
               std::to_string(a.log.size()) + " bytes), checkpoints " + (same_ckpt ? "byte-identical" : "DIFFER") +
               " (" + std::to_string(a.ckpt.size()) + " bytes)");
}

void bench() {
    BenchConfig cfg;
    cfg.in_channels = 64;
    cfg.out_channels = 64;
    cfg.kernel = 3;
    cfg.hw = 128;
    cfg.iters = 5;
    const BenchResult r = run_bench(cfg);
    const bool ok = r.equal && r.ratio() >= 1.0;
    report("bench_sanity", ok,
           std::string(r.equal ? "paths equal" : "paths DIFFER") + fmt(", packed %.3f GOP/s", r.packed_gops()) +
               fmt(" vs float %.3f GOP/s", r.float_gops()) + fmt(", ratio %.2fx (>= 1x)", r.ratio()) + " [" + r.isa +
               "]",
           {{"ratio", r.ratio()}, {"packed_ns", r.packed_ns}, {"float_ns", r.float_ns}});
}

} // namespace

int main(int argc, char** argv) {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
    fs::create_directories(out);
    g_summary.open(out / "summary.jsonl", std::ios::binary);

    kernels_and_gated();
    suite("mabg_suite", "mabg");
    suite("sgra_suite", "sgra");
    accounting();
    gradients();
    bench();
    training(out);

    std::size_t passed = 0;
    for (const auto& o : g_outcomes) passed += o.passed;
    std::printf("acceptance: %zu/%zu criteria passed\n", passed, g_outcomes.size());
    return passed == g_outcomes.size() ? 0 : 1;
}
