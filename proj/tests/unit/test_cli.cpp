// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(BINMOIRE_CLI) + " " + args + " 2>&1";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (p == nullptr) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

private:
    fs::path path_;
};

} // namespace

TEST(Cli, NoCommandIsUsageError) { EXPECT_EQ(run("").code, 2); }

TEST(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("count --bogus 1").code, 2); }

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST(Cli, VerifyKernels) {
    const CliRun r = run("verify --suite kernels");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("xnor_conv2d: 200/200 exact"), std::string::npos);
}

TEST(Cli, VerifyBogusSuite) { EXPECT_EQ(run("verify --suite bogus").code, 2); }

TEST(Cli, VerifyFailsUnderFaultInjection) {
    const CliRun r = run("verify --suite kernels", "BINMOIRE_FAULT_INJECT=1");
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("[FAIL] xnor_conv2d"), std::string::npos);
}

TEST(Cli, VerifyAll) {
    const CliRun r = run("verify");
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, BenchTinyConfig) {
    const CliRun r = run("bench --cin 1 --cout 1 --k 1 --hw 8 --iters 2");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("paths equal: yes"), std::string::npos);
    EXPECT_NE(r.out.find("GOP/s"), std::string::npos);
}

TEST(Cli, BenchZeroItersIsUsageError) { EXPECT_EQ(run("bench --iters 0").code, 2); }

TEST(Cli, BenchFailsWhenPathsDisagree) {
    EXPECT_EQ(run("bench --cin 4 --cout 4 --k 3 --hw 16 --iters 1", "BINMOIRE_FAULT_INJECT=1").code, 1);
}

TEST(Cli, CountDefaultConfig) {
    const CliRun r = run("count");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("enc0.b0.conv"), std::string::npos);
    EXPECT_NE(r.out.find("Params ="), std::string::npos);
}

TEST(Cli, DistinctErrorMessages) {
    TempDir d("binmoire_cli_errors");
    const CliRun missing = run("count --config " + (d / "none.json"));
    EXPECT_EQ(missing.code, 1);
    EXPECT_NE(missing.out.find("io error"), std::string::npos);

    std::ofstream(d / "bad.json") << "{\"network\": {\"scales\": \"two\"}}";
    const CliRun bad = run("count --config " + (d / "bad.json"));
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.out.find("config error"), std::string::npos);

    std::ofstream(d / "junk.ckpt") << "not a checkpoint at all";
    const CliRun ck = run("eval --ckpt " + (d / "junk.ckpt") + " --in x.ppm --out y.ppm");
    EXPECT_EQ(ck.code, 1);
    EXPECT_NE(ck.out.find("checksum"), std::string::npos);
}

TEST(Cli, DemoIsDeterministic) {
    TempDir a("binmoire_cli_demo_a"), b("binmoire_cli_demo_b");
    ASSERT_EQ(run("demo --seed 7 --out " + a.path().string()).code, 0);
    ASSERT_EQ(run("demo --seed 7 --out " + b.path().string()).code, 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a.path())) {
        ++files;
        EXPECT_EQ(slurp(e.path()), slurp(b.path() / e.path().filename())) << e.path();
    }
    EXPECT_EQ(files, 16u);
    EXPECT_TRUE(fs::exists(a.path() / "pair_000_clean.ppm"));
    EXPECT_TRUE(fs::exists(a.path() / "pair_007_degraded.ppm"));
}

TEST(Cli, TrainThenEval) {
    TempDir d("binmoire_cli_train");
    std::ofstream(d / "cfg.json") << R"({"network": {"base_channels": 4, "blocks_per_scale": 1},
                                         "train": {"crop": 32, "heldout_pairs": 2}})";
    const CliRun t = run("train --config " + (d / "cfg.json") + " --out " + (d / "m.ckpt") + " --steps 3 --seed 5");
    ASSERT_EQ(t.code, 0) << t.out;
    const std::string log = slurp(d / "m.ckpt.metrics.jsonl");
    std::size_t lines = 0;
    for (char c : log) lines += c == '\n';
    EXPECT_EQ(lines, 3u);

    ASSERT_EQ(run("demo --seed 3 --out " + (d / "demo")).code, 0);
    const CliRun one = run("eval --ckpt " + (d / "m.ckpt") + " --in " + (d / "demo/pair_000_degraded.ppm") + " --out " +
                        (d / "restored.ppm") + " --report " + (d / "rep.jsonl"));
    ASSERT_EQ(one.code, 0) << one.out;
    const std::string rep = slurp(d / "rep.jsonl");
    for (const char* k : {"psnr_in", "psnr_out", "ssim_in", "ssim_out"}) EXPECT_NE(rep.find(k), std::string::npos);
    EXPECT_TRUE(fs::exists(d / "restored.ppm"));

    const CliRun dir = run("eval --ckpt " + (d / "m.ckpt") + " --in " + (d / "demo") + " --out " + (d / "restored") +
                        " --report " + (d / "all.jsonl"));
    ASSERT_EQ(dir.code, 0) << dir.out;
    EXPECT_TRUE(fs::exists(d / "restored/pair_007_restored.ppm"));
    EXPECT_NE(slurp(d / "all.jsonl").find("mean_over"), std::string::npos);
}
