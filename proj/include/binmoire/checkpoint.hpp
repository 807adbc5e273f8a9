// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

// Checkpoint layout (all integers little-endian):
//
//   "BMCK"              4-byte magic
//   u32 version         kCheckpointVersion
//   u32 n, n bytes      network config (JSON)
//   u32 n, n bytes      manifest (JSON): {"descriptor_order": "...",
//                       "tensors": [{"name", "role", "shape": [4],
//                       "binarized", "use_mabg"}, ...]}
//   payloads            float32 tensors, in manifest order
//   u32 crc32           over every preceding byte
//
// Loading rebuilds the graph from the config and fills parameters by name,
// so the manifest order on disk is free.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binmoire/network.hpp"

namespace binmoire {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Network& net);

/// Errors: ChecksumError (CRC mismatch), FormatError (bad magic, malformed
/// manifest, missing or mis-shaped tensors, truncation), VersionError.
Network deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Network& net, const std::string& path);
/// IoError when the file cannot be read; otherwise as deserialize_checkpoint.
Network load_checkpoint(const std::string& path);

} // namespace binmoire
