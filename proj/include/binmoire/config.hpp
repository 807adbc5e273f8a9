// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// JSON configuration documents:
//
//   {
//     "network": { "scales": 2, "base_channels": 16, "blocks_per_scale": 2,
//                  "kernel_size": 3, "io_kernel_size": 3, "io_channels": 3,
//                  "use_mabg": true, "use_sgra": true, "group_divisor": 1,
//                  "mabg_disabled": [], "channels": [] },
//     "train":   { "steps": 2000, "batch": 2, "crop": 64, "seed": 1,
//                  "lr_max": 2e-4, "period": 1000, "val_interval": 1,
//                  "repeat_sample": false, "heldout_seed": 9001,
//                  "heldout_pairs": 32 }
//   }
//
// Both sections and every key are optional; missing keys keep their
// defaults. Unknown keys and wrongly typed values are ConfigErrors.

#pragma once

#include <string>

#include "nlohmann/json.hpp"

#include "binmoire/network.hpp"
#include "binmoire/train.hpp"

namespace binmoire {

struct ConfigDocument {
    NetworkConfig network;
    TrainConfig train;
};

NetworkConfig network_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NetworkConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);

ConfigDocument parse_config(const std::string& text);
/// Throws IoError when the file cannot be read.
ConfigDocument load_config(const std::string& path);

} // namespace binmoire
