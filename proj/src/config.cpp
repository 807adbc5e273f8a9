// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace binmoire {

namespace {

using nlohmann::json;

void require_object(const json& j, const char* section) {
    if (!j.is_object()) throw ConfigError(std::string("config: '") + section + "' must be an object");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* section) {
    for (const auto& [key, _] : j.items())
        if (known.count(key) == 0) throw ConfigError(std::string("config: unknown key '") + key + "' in " + section);
}

template <class T>
void read(const json& j, const char* key, T& out, const char* section) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(std::string("config: ") + section + "." + key + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned())
            throw ConfigError(std::string("config: ") + section + "." + key + " must be a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(std::string("config: ") + section + "." + key + " must be a number");
    }
    try {
        out = v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + section + "." + key + ": " + e.what());
    }
}

} // namespace

NetworkConfig network_config_from_json(const json& j) {
    require_object(j, "network");
    reject_unknown(j,
                   {"scales", "base_channels", "blocks_per_scale", "kernel_size", "io_kernel_size", "io_channels",
                    "use_mabg", "use_sgra", "group_divisor", "mabg_disabled", "channels"},
                   "network");
    NetworkConfig c;
    const char* s = "network";
    read(j, "scales", c.scales, s);
    read(j, "base_channels", c.base_channels, s);
    read(j, "blocks_per_scale", c.blocks_per_scale, s);
    read(j, "kernel_size", c.kernel_size, s);
    read(j, "io_kernel_size", c.io_kernel_size, s);
    read(j, "io_channels", c.io_channels, s);
    read(j, "use_mabg", c.use_mabg, s);
    read(j, "use_sgra", c.use_sgra, s);
    read(j, "group_divisor", c.group_divisor, s);
    if (j.contains("mabg_disabled")) {
        const json& v = j.at("mabg_disabled");
        if (!v.is_array()) throw ConfigError("config: network.mabg_disabled must be an array of layer names");
        for (const auto& e : v) {
            if (!e.is_string()) throw ConfigError("config: network.mabg_disabled must be an array of layer names");
            c.mabg_disabled.push_back(e.get<std::string>());
        }
    }
    if (j.contains("channels")) {
        const json& v = j.at("channels");
        if (!v.is_array()) throw ConfigError("config: network.channels must be an array of integers");
        for (const auto& e : v) {
            if (!e.is_number_unsigned()) throw ConfigError("config: network.channels must be an array of integers");
            c.channels.push_back(e.get<std::size_t>());
        }
    }
    c.validate();
    return c;
}

json to_json(const NetworkConfig& c) {
    return {{"scales", c.scales},
            {"base_channels", c.base_channels},
            {"blocks_per_scale", c.blocks_per_scale},
            {"kernel_size", c.kernel_size},
            {"io_kernel_size", c.io_kernel_size},
            {"io_channels", c.io_channels},
            {"use_mabg", c.use_mabg},
            {"use_sgra", c.use_sgra},
            {"group_divisor", c.group_divisor},
            {"mabg_disabled", c.mabg_disabled},
            {"channels", c.channels}};
}

TrainConfig train_config_from_json(const json& j) {
    require_object(j, "train");
    reject_unknown(j,
                   {"steps", "batch", "crop", "seed", "lr_max", "period", "val_interval", "repeat_sample",
                    "heldout_seed", "heldout_pairs"},
                   "train");
    TrainConfig c;
    const char* s = "train";
    read(j, "steps", c.steps, s);
    read(j, "batch", c.batch, s);
    read(j, "crop", c.crop, s);
    read(j, "seed", c.seed, s);
    read(j, "lr_max", c.lr_max, s);
    read(j, "period", c.period, s);
    read(j, "val_interval", c.val_interval, s);
    read(j, "repeat_sample", c.repeat_sample, s);
    read(j, "heldout_seed", c.heldout_seed, s);
    read(j, "heldout_pairs", c.heldout_pairs, s);
    c.validate();
    return c;
}

json to_json(const TrainConfig& c) {
    return {{"steps", c.steps},
            {"batch", c.batch},
            {"crop", c.crop},
            {"seed", c.seed},
            {"lr_max", c.lr_max},
            {"period", c.period},
            {"val_interval", c.val_interval},
            {"repeat_sample", c.repeat_sample},
            {"heldout_seed", c.heldout_seed},
            {"heldout_pairs", c.heldout_pairs}};
}

ConfigDocument parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed document: ") + e.what());
    }
    require_object(j, "document");
    reject_unknown(j, {"network", "train"}, "document");
    ConfigDocument d;
    if (j.contains("network")) d.network = network_config_from_json(j.at("network"));
    if (j.contains("train")) d.train = train_config_from_json(j.at("train"));
    return d;
}

ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace binmoire
