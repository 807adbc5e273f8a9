// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "binmoire/network.hpp"
#include "binmoire/tensor.hpp"

namespace binmoire {

/// lr(k) = lr_max * (1 + cos(pi * (k mod T) / T)) / 2.
struct LrSchedule {
    double lr_max = 2e-4;
    std::size_t period = 1000;
};

double lr_at(std::size_t k, const LrSchedule& sched);

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Moments are held in double, one vector per parameter tensor.
struct OptimState {
    AdamHyper hyper;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> m, v;

    static OptimState for_params(const std::vector<FloatTensor>& params, AdamHyper h = {});
};

/// One bias-corrected Adam update. Throws TrainingError naming the parameter
/// (from `names` when given, else its index) on a non-finite gradient; no
/// parameter is modified in that case.
void adam_step(std::vector<FloatTensor>& params, const std::vector<FloatTensor>& grads, OptimState& st, double lr,
               const std::vector<std::string>* names = nullptr);

struct MoireSample {
    FloatTensor clean;    ///< (1, 3, hw, hw) in [0, 1]
    FloatTensor degraded; ///< clean + overlay, clamped to [0, 1]
    std::uint64_t seed = 0;
};

/// Procedural content (bilinear colour ramp, 2-4 flat shapes, low-frequency
/// value noise) plus A * g1 * g2 * tint, where g1, g2 are sinusoidal gratings
/// with frequencies in [4, hw/4] cycles per image and random orientation and
/// phase, A in [0.1, 0.4] unless `amplitude` is given, tint in [0.5, 1] per
/// colour channel. Requires hw >= 32.
MoireSample synth_moire(std::uint64_t seed, std::size_t hw, std::optional<double> amplitude = std::nullopt);

struct TrainConfig {
    std::size_t steps = 2000;
    std::size_t batch = 2;
    std::size_t crop = 64;
    std::uint64_t seed = 1;
    double lr_max = 2e-4;
    std::size_t period = 1000;
    std::size_t val_interval = 1;   ///< psnr_val every n steps (and at the last), null otherwise
    bool repeat_sample = false;     ///< train on one fixed batch (overfitting smoke test)
    std::uint64_t heldout_seed = 9001;
    std::size_t heldout_pairs = 32;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct StepRecord {
    std::size_t step = 0;        ///< 1-based count of completed updates
    double lr = 0.0;             ///< rate used by this update
    double loss = 0.0;           ///< batch L1 loss before the update
    std::optional<double> psnr_val; ///< fixed validation pair after the update

    /// {"step":..,"lr":..,"loss":..,"psnr_val":..} on one line.
    std::string json() const;
};

struct TrainResult {
    Network net;
    std::vector<StepRecord> records;

    std::string log() const;
    /// Mean loss over the last n records (all of them when fewer).
    double final_loss(std::size_t n = 100) const;
};

/// Seed-determined training batch (batch, 3, crop, crop).
std::pair<FloatTensor, FloatTensor> make_batch(const TrainConfig& cfg, std::size_t step);

TrainResult train_loop(const NetworkConfig& net_cfg, const TrainConfig& cfg,
                       const std::function<void(const StepRecord&)>& on_record = {});

struct HeldoutReport {
    double psnr_in = 0.0;  ///< mean over pairs
    double psnr_out = 0.0;
    double ssim_in = 0.0;
    double ssim_out = 0.0;
    std::size_t pairs = 0;
};

/// Deployed-network evaluation on `pairs` pairs from seeds
/// mix_seed(heldout_seed, i); outputs are clamped to [0, 1].
HeldoutReport evaluate_heldout(const Network& net, std::uint64_t heldout_seed, std::size_t pairs, std::size_t hw);

} // namespace binmoire
