// Copyright 2026 The binmoire Authors.
// SPDX-License-Identifier: Apache-2.0

#include "binmoire/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "nlohmann/json.hpp"

#include "binmoire/config.hpp"
#include "binmoire/mabg.hpp"

namespace binmoire {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'B', 'M', 'C', 'K'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_blob(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

std::uint32_t crc32_of(const std::uint8_t* p, std::size_t n) {
    uLong crc = crc32(0L, Z_NULL, 0);
    while (n > 0) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
        crc = crc32(crc, p, chunk);
        p += chunk;
        n -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

class Cursor {
public:
    Cursor(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
    const std::uint8_t* take(std::size_t k, const char* what) {
        if (n_ - pos_ < k) throw FormatError(std::string("checkpoint: truncated ") + what);
        const std::uint8_t* r = p_ + pos_;
        pos_ += k;
        return r;
    }
    std::uint32_t u32(const char* what) { return get_u32(take(4, what)); }
    std::string blob(const char* what) {
        const std::uint32_t len = u32(what);
        const auto* p = take(len, what);
        return {reinterpret_cast<const char*>(p), len};
    }
    bool done() const { return pos_ == n_; }

private:
    const std::uint8_t* p_;
    std::size_t n_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Network& net) {
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    put_u32(out, kCheckpointVersion);
    put_blob(out, to_json(net.config).dump());
    json tensors = json::array();
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        const ParamInfo& p = net.params[i];
        const Shape s = net.values[i].shape();
        tensors.push_back({{"name", p.name},
                           {"role", role_name(p.role)},
                           {"shape", {s.n, s.c, s.h, s.w}},
                           {"binarized", p.binarized},
                           {"use_mabg", p.use_mabg}});
    }
    put_blob(out, json{{"descriptor_order", kDescriptorOrder}, {"tensors", tensors}}.dump());
    for (const auto& v : net.values)
        for (float f : v.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
    put_u32(out, crc32_of(out.data(), out.size()));
    return out;
}

Network deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12) throw FormatError("checkpoint: file too short");
    const std::size_t body = bytes.size() - 4;
    if (crc32_of(bytes.data(), body) != get_u32(bytes.data() + body))
        throw ChecksumError("checkpoint: checksum mismatch (file is corrupt)");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
    Cursor cur(bytes.data() + 4, body - 4);
    const std::uint32_t version = cur.u32("version");
    if (version != kCheckpointVersion)
        throw VersionError("checkpoint: format version " + std::to_string(version) + ", this build reads " +
                           std::to_string(kCheckpointVersion));

    json cfg_json, manifest;
    try {
        cfg_json = json::parse(cur.blob("config"));
        manifest = json::parse(cur.blob("manifest"));
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("checkpoint: malformed header JSON: ") + e.what());
    }
    NetworkConfig cfg;
    try {
        cfg = network_config_from_json(cfg_json);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("checkpoint: bad network config: ") + e.what());
    }
    Network net = build_network(cfg, 0);

    try {
        if (manifest.at("descriptor_order").get<std::string>() != kDescriptorOrder)
            throw FormatError("checkpoint: gate descriptor order differs from this build");
        std::map<std::string, FloatTensor> loaded;
        for (const auto& t : manifest.at("tensors")) {
            const auto name = t.at("name").get<std::string>();
            const auto dims = t.at("shape").get<std::vector<std::size_t>>();
            if (dims.size() != 4) throw FormatError("checkpoint: tensor " + name + " is not rank 4");
            const Shape s{dims[0], dims[1], dims[2], dims[3]};
            if (!s.valid() || s.size() > (body / 4)) throw FormatError("checkpoint: tensor " + name + " has bad shape");
            const std::uint8_t* p = cur.take(s.size() * 4, "payload");
            FloatTensor v(s);
            for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::bit_cast<float>(get_u32(p + 4 * i));
            const std::size_t idx = net.find_param(name);
            if (idx == kNoParam) throw FormatError("checkpoint: unexpected tensor " + name);
            if (t.at("role").get<std::string>() != role_name(net.params[idx].role))
                throw FormatError("checkpoint: tensor " + name + " has the wrong role");
            if (!loaded.emplace(name, std::move(v)).second) throw FormatError("checkpoint: duplicate tensor " + name);
        }
        if (!cur.done()) throw FormatError("checkpoint: trailing bytes after payloads");
        for (std::size_t i = 0; i < net.params.size(); ++i) {
            auto it = loaded.find(net.params[i].name);
            if (it == loaded.end()) throw FormatError("checkpoint: missing tensor " + net.params[i].name);
            if (it->second.shape() != net.values[i].shape())
                throw FormatError("checkpoint: tensor " + net.params[i].name + " has shape " +
                                  it->second.shape().str() + ", expected " + net.values[i].shape().str());
            net.values[i] = std::move(it->second);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("checkpoint: malformed manifest: ") + e.what());
    }
    return net;
}

void save_checkpoint(const Network& net, const std::string& path) {
    const auto bytes = serialize_checkpoint(net);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

Network load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

} // namespace binmoire
