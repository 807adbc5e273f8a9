// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "binmoire/checkpoint.hpp"
#include "binmoire/config.hpp"
#include "binmoire/error.hpp"
#include "binmoire/metrics.hpp"
#include "binmoire/train.hpp"

using namespace binmoire;

TEST(LrSchedule, CosineWithRestarts) {
    const LrSchedule s{2e-4, 1000};
    EXPECT_DOUBLE_EQ(lr_at(0, s), 2e-4);
    EXPECT_NEAR(lr_at(500, s), 1e-4, 1e-18);
    EXPECT_LT(lr_at(999, s), 1e-9);
    EXPECT_DOUBLE_EQ(lr_at(1000, s), 2e-4);
    for (std::size_t k = 1; k < 1000; ++k) EXPECT_LT(lr_at(k, s), lr_at(k - 1, s));
    EXPECT_THROW(lr_at(0, LrSchedule{1e-3, 0}), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    std::vector<FloatTensor> p{FloatTensor({1, 1, 1, 3}, std::vector<float>{1, 1, 1})};
    const std::vector<FloatTensor> g{FloatTensor({1, 1, 1, 3}, std::vector<float>{0.5f, -2.0f, 0.0f})};
    OptimState st = OptimState::for_params(p);
    adam_step(p, g, st, 0.1);
    // Bias-corrected first step: m_hat / sqrt(v_hat) = sign(g).
    EXPECT_NEAR(p[0][0], 0.9f, 1e-6);
    EXPECT_NEAR(p[0][1], 1.1f, 1e-6);
    EXPECT_EQ(p[0][2], 1.0f);
    EXPECT_EQ(st.step, 1u);
}

TEST(Adam, SecondStepMatchesHandComputation) {
    std::vector<FloatTensor> p{FloatTensor({1, 1, 1, 1}, 0.0f)};
    OptimState st = OptimState::for_params(p);
    adam_step(p, {FloatTensor({1, 1, 1, 1}, 1.0f)}, st, 0.01);
    adam_step(p, {FloatTensor({1, 1, 1, 1}, 3.0f)}, st, 0.01);
    const double m = 0.9 * 0.1 + 0.1 * 3.0, v = 0.999 * 0.001 + 0.001 * 9.0;
    const double step2 = 0.01 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
    EXPECT_NEAR(p[0][0], static_cast<float>(-0.01 - step2), 1e-7);
}

TEST(Adam, NonFiniteGradientNamesParameter) {
    std::vector<FloatTensor> p{FloatTensor({1, 1, 1, 1}, 0.0f), FloatTensor({1, 1, 1, 1}, 0.0f)};
    OptimState st = OptimState::for_params(p);
    const std::vector<std::string> names{"a.weight", "b.threshold"};
    try {
        adam_step(p, {FloatTensor({1, 1, 1, 1}, 1.0f), FloatTensor({1, 1, 1, 1}, std::numeric_limits<float>::quiet_NaN())},
                  st, 0.1, &names);
        FAIL() << "expected TrainingError";
    } catch (const TrainingError& e) {
        EXPECT_NE(std::string(e.what()).find("b.threshold"), std::string::npos);
    }
    EXPECT_EQ(p[0][0], 0.0f); // nothing applied
}

TEST(Synth, DeterministicAndInRange) {
    const MoireSample a = synth_moire(11, 64), b = synth_moire(11, 64), c = synth_moire(12, 64);
    EXPECT_EQ(a.clean, b.clean);
    EXPECT_EQ(a.degraded, b.degraded);
    EXPECT_NE(a.clean, c.clean);
    for (float v : a.degraded.data()) {
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
    }
    EXPECT_LT(psnr(a.degraded, a.clean), 40.0);
}

TEST(Synth, AmplitudeOverrideKeepsScene) {
    const MoireSample a = synth_moire(13, 48, 0.0), b = synth_moire(13, 48, 0.3), c = synth_moire(13, 48);
    EXPECT_EQ(a.clean, b.clean);
    EXPECT_EQ(a.clean, c.clean);
    EXPECT_EQ(a.degraded, a.clean);
    EXPECT_THROW(synth_moire(1, 16), ConfigError);
}

TEST(Synth, MoireIsHighFrequency) {
    // The overlay carries more energy than the smooth scene at the pixel scale.
    const MoireSample s = synth_moire(14, 64, 0.3);
    double dc = 0.0, dd = 0.0;
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < 64; ++i)
            for (std::size_t j = 1; j < 64; ++j) {
                dc += std::fabs(s.clean.at(0, c, i, j) - s.clean.at(0, c, i, j - 1));
                dd += std::fabs(s.degraded.at(0, c, i, j) - s.degraded.at(0, c, i, j - 1));
            }
    EXPECT_GT(dd, 2.0 * dc);
}

TEST(Config, DefaultsAndRoundTrip) {
    const ConfigDocument d = parse_config("{}");
    EXPECT_EQ(d.network, NetworkConfig{});
    EXPECT_EQ(d.train, TrainConfig{});
    NetworkConfig n;
    n.channels = {8, 12};
    n.mabg_disabled = {"up0"};
    TrainConfig t;
    t.steps = 17;
    t.lr_max = 1e-3;
    const nlohmann::json j{{"network", to_json(n)}, {"train", to_json(t)}};
    const ConfigDocument back = parse_config(j.dump());
    EXPECT_EQ(back.network, n);
    EXPECT_EQ(back.train, t);
}

TEST(Config, ErrorsAreConfigErrors) {
    EXPECT_THROW(parse_config("{"), ConfigError);
    EXPECT_THROW(parse_config("[]"), ConfigError);
    EXPECT_THROW(parse_config(R"({"netwrok": {}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"network": {"scales": -1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"network": {"scales": 1.5}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"network": {"use_mabg": 1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"network": {"kernel_size": 4}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"train": {"batch": 0}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"train": {"bogus": 0}})"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

namespace {

NetworkConfig small_net() {
    NetworkConfig c;
    c.base_channels = 8;
    c.blocks_per_scale = 1;
    return c;
}

TrainConfig short_run(std::size_t steps) {
    TrainConfig t;
    t.steps = steps;
    t.crop = 32;
    t.val_interval = 5;
    return t;
}

} // namespace

TEST(TrainLoop, OverfitsOneBatch) {
    TrainConfig t = short_run(60);
    t.repeat_sample = true;
    t.lr_max = 2e-3;
    t.period = 1000;
    const TrainResult r = train_loop(small_net(), t);
    ASSERT_EQ(r.records.size(), 60u);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < 5; ++i) first += r.records[i].loss, last += r.records[55 + i].loss;
    EXPECT_LT(last, 0.8 * first);
}

TEST(TrainLoop, RecordsAndDeterminism) {
    const TrainConfig t = short_run(7);
    const TrainResult a = train_loop(small_net(), t);
    const TrainResult b = train_loop(small_net(), t);
    EXPECT_EQ(a.log(), b.log());
    EXPECT_EQ(serialize_checkpoint(a.net), serialize_checkpoint(b.net));
    EXPECT_EQ(a.records[0].step, 1u);
    EXPECT_FALSE(a.records[0].psnr_val.has_value());
    EXPECT_TRUE(a.records[4].psnr_val.has_value());
    EXPECT_TRUE(a.records[6].psnr_val.has_value()); // last step
    EXPECT_DOUBLE_EQ(a.records[0].lr, lr_at(0, {t.lr_max, t.period}));
    EXPECT_NE(a.records[0].json().find("\"psnr_val\":null"), std::string::npos);
}

TEST(TrainLoop, SeedChangesRun) {
    TrainConfig t = short_run(3);
    const TrainResult a = train_loop(small_net(), t);
    t.seed = 2;
    const TrainResult b = train_loop(small_net(), t);
    EXPECT_NE(a.log(), b.log());
}

TEST(TrainLoop, RejectsCropNotMultiple) {
    NetworkConfig c = small_net();
    c.scales = 3;
    TrainConfig t = short_run(1);
    t.crop = 34;
    EXPECT_THROW(train_loop(c, t), ConfigError);
}

TEST(TrainLoop, BatchSeedsAreDistinct) {
    const auto [c0, d0] = make_batch(short_run(1), 0);
    const auto [c1, d1] = make_batch(short_run(1), 1);
    EXPECT_EQ(c0.shape(), (Shape{2, 3, 32, 32}));
    EXPECT_NE(c0, c1);
    EXPECT_NE(std::vector<float>(c0.raw(), c0.raw() + c0.shape().size() / 2),
              std::vector<float>(c0.raw() + c0.shape().size() / 2, c0.raw() + c0.shape().size()));
}

TEST(Heldout, ReportsMeans) {
    const Network net = build_network(small_net(), 1);
    const HeldoutReport h = evaluate_heldout(net, 9001, 3, 32);
    EXPECT_EQ(h.pairs, 3u);
    EXPECT_TRUE(std::isfinite(h.psnr_in));
    EXPECT_TRUE(std::isfinite(h.psnr_out));
    EXPECT_GT(h.ssim_in, 0.0);
}
