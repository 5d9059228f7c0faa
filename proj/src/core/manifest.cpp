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

#include "core/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace djf {

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest '" + path + "'");

    Manifest manifest;
    manifest.dataset = std::filesystem::path(path).stem().string();
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&base](const std::string& p) {
        if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
        return (base / p).string();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": invalid JSON: " +
                              e.what());
        }
        if (!j.is_object()) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected a JSON object");
        }
        SamplePair pair;
        if (!j.contains("target_path") || !j["target_path"].is_string()) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": missing target_path");
        }
        pair.target_path = j["target_path"].get<std::string>();
        if (!j.contains("guidance_path") || !j["guidance_path"].is_string()) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": missing guidance_path");
        }
        pair.guidance_path = j["guidance_path"].get<std::string>();
        if (j.contains("gt_path")) pair.gt_path = j["gt_path"].get<std::string>();
        if (j.contains("depth_scale")) pair.depth_scale = j["depth_scale"].get<double>();
        if (j.contains("missing_value")) pair.missing_value = j["missing_value"].get<double>();
        if (pair.target_path.empty() || pair.guidance_path.empty()) {
            throw FormatError(path + ":" + std::to_string(line_no) + ": empty path");
        }
        if (!(pair.depth_scale > 0)) {
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": depth_scale must be > 0");
        }
        // Relative paths are taken relative to the manifest's directory.
        pair.target_path = resolve(pair.target_path);
        pair.guidance_path = resolve(pair.guidance_path);
        pair.gt_path = resolve(pair.gt_path);
        manifest.pairs.push_back(std::move(pair));
    }
    return manifest;
}

}  // namespace djf
