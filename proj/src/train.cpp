// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlohmann/json.hpp"

#include "binmoire/engine.hpp"
#include "binmoire/metrics.hpp"
#include "binmoire/rng.hpp"

namespace binmoire {

double lr_at(std::size_t k, const LrSchedule& sched) {
    if (sched.period == 0) throw ConfigError("lr schedule: period must be >= 1");
    const double phase = static_cast<double>(k % sched.period) / static_cast<double>(sched.period);
    return sched.lr_max * (1.0 + std::cos(std::numbers::pi * phase)) / 2.0;
}

OptimState OptimState::for_params(const std::vector<FloatTensor>& params, AdamHyper h) {
    OptimState st;
    st.hyper = h;
    for (const auto& p : params) {
        st.m.emplace_back(p.size(), 0.0);
        st.v.emplace_back(p.size(), 0.0);
    }
    return st;
}

void adam_step(std::vector<FloatTensor>& params, const std::vector<FloatTensor>& grads, OptimState& st, double lr,
               const std::vector<std::string>* names) {
    if (grads.size() != params.size() || st.m.size() != params.size())
        throw DimensionError("adam_step: parameter, gradient and state counts differ");
    for (std::size_t p = 0; p < params.size(); ++p) {
        require_same_shape(params[p].shape(), grads[p].shape(), "adam_step");
        if (!all_finite(grads[p]))
            throw TrainingError("non-finite gradient in parameter " +
                                (names != nullptr ? (*names)[p] : "#" + std::to_string(p)));
    }
    ++st.step;
    const AdamHyper& h = st.hyper;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(st.step));
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& m = st.m[p];
        auto& v = st.v[p];
        float* w = params[p].raw();
        const float* g = grads[p].raw();
        for (std::size_t i = 0; i < params[p].size(); ++i) {
            const double gi = g[i];
            m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * gi;
            v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * gi * gi;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] = static_cast<float>(static_cast<double>(w[i]) - lr * mhat / (std::sqrt(vhat) + h.eps));
        }
    }
}

MoireSample synth_moire(std::uint64_t seed, std::size_t hw, std::optional<double> amplitude) {
    if (hw < 32) throw ConfigError("synth_moire: hw must be >= 32, got " + std::to_string(hw));
    Rng r(seed);
    const std::size_t n = hw * hw;
    const double inv = 1.0 / static_cast<double>(hw - 1);
    std::vector<double> img(3 * n);
    auto at = [&](std::size_t c, std::size_t row, std::size_t col) -> double& { return img[c * n + row * hw + col]; };

    double corners[4][3];
    for (auto& corner : corners)
        for (double& v : corner) v = r.uniform(0.15, 0.85);
    for (std::size_t row = 0; row < hw; ++row)
        for (std::size_t col = 0; col < hw; ++col) {
            const double y = row * inv, x = col * inv;
            for (std::size_t c = 0; c < 3; ++c)
                at(c, row, col) = (1 - x) * (1 - y) * corners[0][c] + x * (1 - y) * corners[1][c] +
                                  (1 - x) * y * corners[2][c] + x * y * corners[3][c];
        }

    const auto shapes = r.integer(2, 4);
    for (std::int64_t k = 0; k < shapes; ++k) {
        double col_rgb[3];
        for (double& v : col_rgb) v = r.uniform(0.05, 0.95);
        const double cx = r.uniform(0.1, 0.9), cy = r.uniform(0.1, 0.9), rad = r.uniform(0.08, 0.3);
        const bool circle = r.uniform() < 0.5;
        const double aspect = circle ? 1.0 : r.uniform(0.5, 1.5);
        for (std::size_t row = 0; row < hw; ++row)
            for (std::size_t col = 0; col < hw; ++col) {
                const double y = row * inv, x = col * inv;
                const bool inside = circle ? (x - cx) * (x - cx) + (y - cy) * (y - cy) < rad * rad
                                           : std::abs(x - cx) < rad && std::abs(y - cy) < rad * aspect;
                if (!inside) continue;
                for (std::size_t c = 0; c < 3; ++c) at(c, row, col) = 0.3 * at(c, row, col) + 0.7 * col_rgb[c];
            }
    }

    double grid[9][9];
    for (auto& g : grid)
        for (double& v : g) v = r.uniform(-1.0, 1.0);
    for (std::size_t row = 0; row < hw; ++row)
        for (std::size_t col = 0; col < hw; ++col) {
            const double gy = row * inv * 8.0, gx = col * inv * 8.0;
            const auto iy = std::min<std::size_t>(static_cast<std::size_t>(gy), 7);
            const auto ix = std::min<std::size_t>(static_cast<std::size_t>(gx), 7);
            const double fy = gy - static_cast<double>(iy), fx = gx - static_cast<double>(ix);
            const double noise = grid[iy][ix] * (1 - fx) * (1 - fy) + grid[iy][ix + 1] * fx * (1 - fy) +
                                 grid[iy + 1][ix] * (1 - fx) * fy + grid[iy + 1][ix + 1] * fx * fy;
            for (std::size_t c = 0; c < 3; ++c) at(c, row, col) = std::clamp(at(c, row, col) + 0.04 * noise, 0.0, 1.0);
        }

    // Drawn unconditionally so an explicit amplitude leaves the rest of the
    // stream (and hence the clean image and grating geometry) unchanged.
    const double drawn = r.uniform(0.1, 0.4);
    const double amp = amplitude.value_or(drawn);
    struct Grating {
        double f, th, ph;
    };
    auto grating = [&] {
        Grating g{};
        g.f = r.uniform(4.0, static_cast<double>(hw) / 4.0);
        g.th = r.uniform(0.0, std::numbers::pi);
        g.ph = r.uniform(0.0, 2.0 * std::numbers::pi);
        return g;
    };
    const Grating g1 = grating();
    const Grating g2 = grating();
    double tint[3];
    for (double& v : tint) v = r.uniform(0.5, 1.0);

    MoireSample s{FloatTensor({1, 3, hw, hw}), FloatTensor({1, 3, hw, hw}), seed};
    const double two_pi_over = 2.0 * std::numbers::pi / static_cast<double>(hw);
    for (std::size_t row = 0; row < hw; ++row)
        for (std::size_t col = 0; col < hw; ++col) {
            auto wave = [&](const Grating& g) {
                return std::sin(two_pi_over * g.f * (col * std::cos(g.th) + row * std::sin(g.th)) + g.ph);
            };
            const double mo = amp * wave(g1) * wave(g2);
            for (std::size_t c = 0; c < 3; ++c) {
                const double clean = at(c, row, col);
                s.clean.at(0, c, row, col) = static_cast<float>(clean);
                s.degraded.at(0, c, row, col) = static_cast<float>(std::clamp(clean + mo * tint[c], 0.0, 1.0));
            }
        }
    return s;
}

void TrainConfig::validate() const {
    if (batch == 0) throw ConfigError("train: batch must be >= 1");
    if (crop < 32) throw ConfigError("train: crop must be >= 32");
    if (period == 0) throw ConfigError("train: period must be >= 1");
    if (val_interval == 0) throw ConfigError("train: val_interval must be >= 1");
    if (!(lr_max > 0.0) || !std::isfinite(lr_max)) throw ConfigError("train: lr_max must be positive");
}

std::string StepRecord::json() const {
    nlohmann::json j;
    j["step"] = step;
    j["lr"] = lr;
    j["loss"] = loss;
    j["psnr_val"] = psnr_val.has_value() ? nlohmann::json(*psnr_val) : nlohmann::json(nullptr);
    return j.dump();
}

std::string TrainResult::log() const {
    std::string out;
    for (const auto& r : records) out += r.json() + "\n";
    return out;
}

double TrainResult::final_loss(std::size_t n) const {
    if (records.empty()) return 0.0;
    const std::size_t k = std::min(n, records.size());
    double acc = 0.0;
    for (std::size_t i = records.size() - k; i < records.size(); ++i) acc += records[i].loss;
    return acc / static_cast<double>(k);
}

namespace {

constexpr std::uint64_t kValidationStream = 0x76616c6964617465ull;

void copy_sample(const FloatTensor& src, FloatTensor& dst, std::size_t b) {
    std::copy(src.raw(), src.raw() + src.size(), dst.raw() + b * src.size());
}

std::string gradient_norms(const Network& net, const std::vector<FloatTensor>& grads) {
    std::ostringstream os;
    for (std::size_t p = 0; p < grads.size(); ++p) {
        double acc = 0.0;
        for (float g : grads[p].data()) acc += static_cast<double>(g) * g;
        os << "  " << net.params[p].name << " |grad| = " << std::sqrt(acc) << "\n";
    }
    return os.str();
}

} // namespace

std::pair<FloatTensor, FloatTensor> make_batch(const TrainConfig& cfg, std::size_t step) {
    const std::size_t k = cfg.repeat_sample ? 0 : step;
    FloatTensor clean({cfg.batch, 3, cfg.crop, cfg.crop});
    FloatTensor degraded({cfg.batch, 3, cfg.crop, cfg.crop});
    for (std::size_t b = 0; b < cfg.batch; ++b) {
        const MoireSample s = synth_moire(mix_seed(cfg.seed, k * cfg.batch + b), cfg.crop);
        copy_sample(s.clean, clean, b);
        copy_sample(s.degraded, degraded, b);
    }
    return {std::move(clean), std::move(degraded)};
}

TrainResult train_loop(const NetworkConfig& net_cfg, const TrainConfig& cfg,
                       const std::function<void(const StepRecord&)>& on_record) {
    cfg.validate();
    TrainResult result{build_network(net_cfg, cfg.seed), {}};
    Network& net = result.net;
    const std::size_t m = net.spatial_multiple();
    if (cfg.crop % m != 0)
        throw ConfigError("train: crop " + std::to_string(cfg.crop) + " must be a multiple of " + std::to_string(m));

    std::vector<std::string> names;
    for (const auto& p : net.params) names.push_back(p.name);
    OptimState st = OptimState::for_params(net.values);
    const LrSchedule sched{cfg.lr_max, cfg.period};
    const MoireSample val = synth_moire(mix_seed(cfg.seed, kValidationStream), cfg.crop);

    Tape<float> tape;
    for (std::size_t k = 0; k < cfg.steps; ++k) {
        const auto [clean, degraded] = make_batch(cfg, k);
        const FloatTensor out = forward_train(net, net.values, degraded, &tape);
        FloatTensor grad_out;
        const float loss = l1_loss(out, clean, &grad_out);
        std::vector<FloatTensor> grads = backward(net, net.values, tape, grad_out);
        if (!std::isfinite(loss))
            throw TrainingError("loss became non-finite at step " + std::to_string(k + 1) +
                                "; gradient norms:\n" + gradient_norms(net, grads));
        const double lr = lr_at(k, sched);
        adam_step(net.values, grads, st, lr, &names);
        for (std::size_t p = 0; p < net.params.size(); ++p)
            if (net.params[p].role == ParamRole::ActSlope)
                for (float& v : net.values[p].data()) v = std::max(v, 1e-3f);

        StepRecord rec{k + 1, lr, static_cast<double>(loss), std::nullopt};
        if ((k + 1) % cfg.val_interval == 0 || k + 1 == cfg.steps)
            rec.psnr_val = psnr(clamp01(net.infer(val.degraded)), val.clean);
        result.records.push_back(rec);
        if (on_record) on_record(rec);
    }
    return result;
}

HeldoutReport evaluate_heldout(const Network& net, std::uint64_t heldout_seed, std::size_t pairs, std::size_t hw) {
    HeldoutReport rep;
    rep.pairs = pairs;
    if (pairs == 0) return rep;
    for (std::size_t i = 0; i < pairs; ++i) {
        const MoireSample s = synth_moire(mix_seed(heldout_seed, i), hw);
        const FloatTensor out = clamp01(net.infer(s.degraded));
        rep.psnr_in += psnr(s.degraded, s.clean);
        rep.psnr_out += psnr(out, s.clean);
        rep.ssim_in += ssim(s.degraded, s.clean);
        rep.ssim_out += ssim(out, s.clean);
    }
    const double n = static_cast<double>(pairs);
    rep.psnr_in /= n;
    rep.psnr_out /= n;
    rep.ssim_in /= n;
    rep.ssim_out /= n;
    return rep;
}

} // namespace binmoire
