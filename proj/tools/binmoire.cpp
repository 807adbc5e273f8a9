// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// binmoire: verify | bench | train | eval | count | demo
// Exit codes: 0 success, 1 failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"

#include "binmoire/bench.hpp"
#include "binmoire/checkpoint.hpp"
#include "binmoire/config.hpp"
#include "binmoire/cost.hpp"
#include "binmoire/error.hpp"
#include "binmoire/image.hpp"
#include "binmoire/metrics.hpp"
#include "binmoire/rng.hpp"
#include "binmoire/train.hpp"
#include "binmoire/verify.hpp"

namespace fs = std::filesystem;
using namespace binmoire;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_verify(const std::string& suite) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = verify::suite_names();
    } else {
        const auto& known = verify::suite_names();
        if (std::find(known.begin(), known.end(), suite) == known.end())
            throw UsageError("unknown suite '" + suite + "' (expected all, kernels, mabg, sgra or grad)");
        names = {suite};
    }
    bool ok = true;
    for (const auto& n : names) {
        const verify::SuiteReport r = verify::run_suite(n);
        std::cout << "== " << n << " (" << r.seconds << " s)\n" << r.text();
        ok = ok && r.passed();
    }
    std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
    return ok ? kOk : kFail;
}

int cmd_bench(const BenchConfig& cfg) {
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const BenchResult r = run_bench(cfg);
    std::cout << r.text();
    if (!r.equal) {
        std::cerr << "bench: packed and float paths disagree; nothing timed\n";
        return kFail;
    }
    return kOk;
}

ConfigDocument config_or_default(const std::string& path) { return path.empty() ? ConfigDocument{} : load_config(path); }

int cmd_train(const std::string& config, const std::string& out, std::optional<std::size_t> steps,
              std::optional<std::uint64_t> seed) {
    ConfigDocument doc = config_or_default(config);
    if (steps) doc.train.steps = *steps;
    if (seed) doc.train.seed = *seed;
    doc.train.validate();
    const std::string log_path = out + ".metrics.jsonl";
    std::ofstream log(log_path, std::ios::binary);
    if (!log) throw IoError("cannot write metrics log '" + log_path + "'");

    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult res = train_loop(doc.network, doc.train, [&](const StepRecord& rec) {
        log << rec.json() << '\n';
        if (rec.step % 100 == 0 || rec.step == doc.train.steps)
            std::cerr << "step " << rec.step << "/" << doc.train.steps << " loss " << rec.loss << '\n';
    });
    log.close();
    save_checkpoint(res.net, out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const HeldoutReport h = evaluate_heldout(res.net, doc.train.heldout_seed, doc.train.heldout_pairs, doc.train.crop);
    std::printf("trained %zu steps in %.1f s; final loss %.6f\n", doc.train.steps, secs, res.final_loss());
    std::printf("held-out (%zu pairs): psnr_in %.3f dB, psnr_out %.3f dB, gain %+.3f dB\n", h.pairs, h.psnr_in,
                h.psnr_out, h.psnr_out - h.psnr_in);
    std::printf("checkpoint: %s\nmetrics log: %s\n", out.c_str(), log_path.c_str());
    return kOk;
}

nlohmann::json eval_one(const Network& net, const fs::path& in, const fs::path& out) {
    const ImageBuffer img = read_image(in.string());
    const FloatTensor x = img.to_tensor();
    const FloatTensor y = clamp01(net.infer(x));
    write_image(out.string(), ImageBuffer::from_tensor(y));

    nlohmann::json rec{{"input", in.string()}, {"output", out.string()}};
    std::string clean_name = in.filename().string();
    const auto pos = clean_name.rfind("_degraded");
    const fs::path clean = pos == std::string::npos ? fs::path()
                                                    : in.parent_path() / clean_name.replace(pos, 9, "_clean");
    if (!clean.empty() && fs::exists(clean)) {
        const FloatTensor c = read_image(clean.string()).to_tensor();
        // Scores use the quantized output, as written to disk.
        const FloatTensor yq = read_image(out.string()).to_tensor();
        rec["psnr_in"] = psnr(x, c);
        rec["psnr_out"] = psnr(yq, c);
        rec["ssim_in"] = ssim(x, c);
        rec["ssim_out"] = ssim(yq, c);
    } else {
        for (const char* k : {"psnr_in", "psnr_out", "ssim_in", "ssim_out"}) rec[k] = nullptr;
        std::cerr << "eval: no clean reference for " << in.string() << "; metrics are null\n";
    }
    return rec;
}

int cmd_eval(const std::string& ckpt, const std::string& in, const std::string& out, const std::string& report) {
    const Network net = load_checkpoint(ckpt);
    std::vector<std::pair<fs::path, fs::path>> jobs;
    if (fs::is_directory(in)) {
        fs::create_directories(out);
        for (const auto& e : fs::directory_iterator(in))
            if (e.path().extension() == ".ppm" && e.path().stem().string().ends_with("_degraded"))
                jobs.emplace_back(e.path(), fs::path(out) / e.path().filename().string().replace(
                                                e.path().filename().string().rfind("_degraded"), 9, "_restored"));
        std::sort(jobs.begin(), jobs.end());
        if (jobs.empty()) throw IoError("no *_degraded.ppm images in '" + in + "'");
    } else {
        jobs.emplace_back(in, out);
    }

    std::ofstream rep;
    if (!report.empty()) {
        rep.open(report, std::ios::binary);
        if (!rep) throw IoError("cannot write report '" + report + "'");
    }
    double sum[4] = {0, 0, 0, 0};
    std::size_t scored = 0;
    for (const auto& [src, dst] : jobs) {
        const nlohmann::json r = eval_one(net, src, dst);
        if (rep.is_open()) rep << r.dump() << '\n';
        if (r["psnr_in"].is_null()) {
            std::printf("%s -> %s\n", src.string().c_str(), dst.string().c_str());
            continue;
        }
        const double v[4] = {r["psnr_in"], r["psnr_out"], r["ssim_in"], r["ssim_out"]};
        for (int k = 0; k < 4; ++k) sum[k] += v[k];
        ++scored;
        std::printf("%s: psnr %.3f -> %.3f dB, ssim %.4f -> %.4f\n", src.filename().string().c_str(), v[0], v[1], v[2],
                    v[3]);
    }
    if (scored > 1) {
        const double n = static_cast<double>(scored);
        nlohmann::json mean{{"mean_over", scored},     {"psnr_in", sum[0] / n}, {"psnr_out", sum[1] / n},
                            {"ssim_in", sum[2] / n}, {"ssim_out", sum[3] / n}};
        if (rep.is_open()) rep << mean.dump() << '\n';
        std::printf("mean over %zu: psnr %.3f -> %.3f dB, ssim %.4f -> %.4f\n", scored, sum[0] / n, sum[1] / n,
                    sum[2] / n, sum[3] / n);
    }
    return kOk;
}

int cmd_count(const std::string& config) {
    const ConfigDocument doc = config_or_default(config);
    const Network net = build_network(doc.network, 0);
    std::cout << count_params_ops(net).table();
    return kOk;
}

int cmd_demo(std::uint64_t seed, const std::string& out) {
    constexpr std::size_t kPairs = 8, kSize = 64;
    fs::create_directories(out);
    for (std::size_t i = 0; i < kPairs; ++i) {
        const MoireSample s = synth_moire(mix_seed(seed, i), kSize);
        char stem[32];
        std::snprintf(stem, sizeof stem, "pair_%03zu", i);
        write_image((fs::path(out) / (std::string(stem) + "_clean.ppm")).string(), ImageBuffer::from_tensor(s.clean));
        write_image((fs::path(out) / (std::string(stem) + "_degraded.ppm")).string(),
                    ImageBuffer::from_tensor(s.degraded));
    }
    std::printf("wrote %zu pairs (%zux%zu) to %s\n", kPairs, kSize, kSize, out.c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binmoire: 1-bit demoireing toolkit"};
    app.require_subcommand(1);

    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "Run oracle-equivalence and invariant suites");
    verify->add_option("--suite", suite, "all|kernels|mabg|sgra|grad");

    BenchConfig bench_cfg;
    auto* bench = app.add_subcommand("bench", "Time packed XNOR conv against the float path");
    bench->add_option("--cin", bench_cfg.in_channels, "input channels");
    bench->add_option("--cout", bench_cfg.out_channels, "output channels");
    bench->add_option("--k", bench_cfg.kernel, "kernel size");
    bench->add_option("--hw", bench_cfg.hw, "spatial size");
    bench->add_option("--iters", bench_cfg.iters, "timed repetitions");

    std::string config, ckpt_out;
    std::optional<std::size_t> steps;
    std::optional<std::uint64_t> train_seed;
    auto* train = app.add_subcommand("train", "Train on synthetic moire pairs");
    train->add_option("--config", config, "JSON config");
    train->add_option("--out", ckpt_out, "checkpoint path")->required();
    train->add_option("--steps", steps, "override train.steps");
    train->add_option("--seed", train_seed, "override train.seed");

    std::string ckpt, in, out, report;
    auto* eval = app.add_subcommand("eval", "Restore images with a checkpoint");
    eval->add_option("--ckpt", ckpt, "checkpoint")->required();
    eval->add_option("--in", in, "degraded image or directory")->required();
    eval->add_option("--out", out, "restored image or directory")->required();
    eval->add_option("--report", report, "metrics records (one JSON object per line)");

    std::string count_config;
    auto* count = app.add_subcommand("count", "Params/OPs accounting table");
    count->add_option("--config", count_config, "JSON config");

    std::uint64_t demo_seed = 1;
    std::string demo_out;
    auto* demo = app.add_subcommand("demo", "Write synthetic (clean, degraded) pairs");
    demo->add_option("--seed", demo_seed, "seed");
    demo->add_option("--out", demo_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*verify) return cmd_verify(suite);
        if (*bench) return cmd_bench(bench_cfg);
        if (*train) return cmd_train(config, ckpt_out, steps, train_seed);
        if (*eval) return cmd_eval(ckpt, in, out, report);
        if (*count) return cmd_count(count_config);
        if (*demo) return cmd_demo(demo_seed, demo_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ChecksumError& e) {
        std::cerr << "checksum error: " << e.what() << '\n';
        return kFail;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kFail;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kFail;
}
