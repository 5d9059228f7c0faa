// Copyright 2026 The djf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace djf {

namespace {

constexpr char kMagic[3] = {'D', 'J', 'F'};
constexpr std::uint8_t kVersion = 0x01;

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32_le(std::vector<std::uint8_t>& out, float v) {
    put_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

float get_f32_le(const std::uint8_t* p) { return std::bit_cast<float>(get_u32_le(p)); }

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& into) {
    if (auto it = j.find(key); it != j.end()) it->get_to(into);
}

}  // namespace

nlohmann::json config_to_json(const NetworkConfig& cfg) {
    return nlohmann::json{{"n1", cfg.n1},
                          {"n2", cfg.n2},
                          {"n3", cfg.n3},
                          {"f1", cfg.f1},
                          {"f2", cfg.f2},
                          {"f3", cfg.f3},
                          {"depth_t", cfg.depth_t},
                          {"depth_g", cfg.depth_g},
                          {"depth_f", cfg.depth_f},
                          {"target_channels", cfg.target_channels},
                          {"guidance_channels", cfg.guidance_channels},
                          {"skip_connection", cfg.skip_connection},
                          {"seed", cfg.seed}};
}

NetworkConfig config_from_json(const nlohmann::json& j, const NetworkConfig& base) {
    if (!j.is_object()) throw FormatError("network config: expected a JSON object");
    static const char* known[] = {"n1",      "n2",      "n3",
                                  "f1",      "f2",      "f3",
                                  "depth_t", "depth_g", "depth_f",
                                  "target_channels",    "guidance_channels",
                                  "skip_connection",    "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw FormatError("network config: unknown key '" + it.key() + "'");
    }
    NetworkConfig cfg = base;
    read_key(j, "n1", cfg.n1);
    read_key(j, "n2", cfg.n2);
    read_key(j, "n3", cfg.n3);
    read_key(j, "f1", cfg.f1);
    read_key(j, "f2", cfg.f2);
    read_key(j, "f3", cfg.f3);
    read_key(j, "depth_t", cfg.depth_t);
    read_key(j, "depth_g", cfg.depth_g);
    read_key(j, "depth_f", cfg.depth_f);
    read_key(j, "target_channels", cfg.target_channels);
    read_key(j, "guidance_channels", cfg.guidance_channels);
    read_key(j, "skip_connection", cfg.skip_connection);
    read_key(j, "seed", cfg.seed);
    return cfg;
}

std::vector<std::uint8_t> serialize(const Model& model) {
    validate(model.config);
    const std::string json = config_to_json(model.config).dump();
    std::vector<std::uint8_t> out;
    out.reserve(8 + json.size() + model_param_count(model) * 4);
    out.insert(out.end(), kMagic, kMagic + 3);
    out.push_back(kVersion);
    put_u32_le(out, static_cast<std::uint32_t>(json.size()));
    out.insert(out.end(), json.begin(), json.end());
    for (const auto* layers : {&model.layers_t, &model.layers_g, &model.layers_f}) {
        for (const auto& l : *layers) {
            for (float w : l.weights) put_f32_le(out, w);
            for (float b : l.biases) put_f32_le(out, b);
        }
    }
    return out;
}

Model deserialize(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8) throw FormatError("checkpoint: truncated header");
    if (std::memcmp(bytes.data(), kMagic, 3) != 0) throw FormatError("checkpoint: bad magic");
    if (bytes[3] != kVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(bytes[3]));
    }
    const std::uint32_t json_len = get_u32_le(bytes.data() + 4);
    if (bytes.size() < 8 + static_cast<std::size_t>(json_len)) {
        throw FormatError("checkpoint: truncated config block");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + json_len);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("checkpoint: config is not valid JSON: ") + e.what());
    }
    const NetworkConfig cfg = config_from_json(j);
    validate(cfg);

    Model model;
    model.config = cfg;
    const std::size_t expected = param_count(cfg);
    const std::size_t payload = bytes.size() - 8 - json_len;
    if (payload != expected * 4) {
        throw FormatError("checkpoint: payload holds " + std::to_string(payload / 4) +
                          " parameters, config requires " + std::to_string(expected));
    }
    const std::uint8_t* p = bytes.data() + 8 + json_len;
    auto read_subnet = [&](const std::vector<LayerShape>& plan) {
        std::vector<ConvLayerParams> layers;
        for (const LayerShape& ls : plan) {
            ConvLayerParams layer;
            layer.out_channels = static_cast<std::size_t>(ls.out_channels);
            layer.in_channels = static_cast<std::size_t>(ls.in_channels);
            layer.kernel_size = static_cast<std::size_t>(ls.kernel);
            const std::size_t nw =
                layer.out_channels * layer.in_channels * layer.kernel_size * layer.kernel_size;
            layer.weights.resize(nw);
            for (std::size_t i = 0; i < nw; ++i, p += 4) layer.weights[i] = get_f32_le(p);
            layer.biases.resize(layer.out_channels);
            for (std::size_t i = 0; i < layer.out_channels; ++i, p += 4) {
                layer.biases[i] = get_f32_le(p);
            }
            layers.push_back(std::move(layer));
        }
        return layers;
    };
    model.layers_t = read_subnet(branch_plan(cfg, cfg.target_channels));
    model.layers_g = read_subnet(branch_plan(cfg, cfg.guidance_channels));
    model.layers_f = read_subnet(fusion_plan(cfg));
    return model;
}

void save_model(const Model& model, const std::string& path) {
    const std::vector<std::uint8_t> bytes = serialize(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return deserialize(bytes);
}

}  // namespace djf
