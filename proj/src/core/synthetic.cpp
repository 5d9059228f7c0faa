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

#include "core/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "core/error.hpp"
#include "core/image_io.hpp"

namespace djf {

Scene make_scene(std::size_t height, std::size_t width, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> depth_level(0.15f, 0.9f);
    std::uniform_real_distribution<float> color(0.05f, 0.95f);

    Scene scene{Tensor(1, height, width), Tensor(3, height, width)};
    auto paint = [&](std::size_t y0, std::size_t y1, std::size_t x0, std::size_t x1, float d,
                     float r, float g, float b) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (std::size_t x = x0; x < x1; ++x) {
                scene.depth.at(0, y, x) = d;
                scene.rgb.at(0, y, x) = r;
                scene.rgb.at(1, y, x) = g;
                scene.rgb.at(2, y, x) = b;
            }
        }
    };
    paint(0, height, 0, width, depth_level(rng), color(rng), color(rng), color(rng));

    std::uniform_int_distribution<int> num_rects(3, 6);
    const int rects = num_rects(rng);
    for (int i = 0; i < rects; ++i) {
        std::uniform_int_distribution<std::size_t> ry(0, height - height / 4);
        std::uniform_int_distribution<std::size_t> rx(0, width - width / 4);
        std::uniform_int_distribution<std::size_t> rh(height / 5, height / 2);
        std::uniform_int_distribution<std::size_t> rw(width / 5, width / 2);
        const std::size_t y0 = ry(rng);
        const std::size_t x0 = rx(rng);
        const std::size_t y1 = std::min(height, y0 + rh(rng));
        const std::size_t x1 = std::min(width, x0 + rw(rng));
        paint(y0, y1, x0, x1, depth_level(rng), color(rng), color(rng), color(rng));
    }
    return scene;
}

std::string write_scene_dataset(const std::string& dir, std::size_t count, std::size_t height,
                                std::size_t width, std::uint64_t seed) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());

    const std::string manifest_path = (fs::path(dir) / "manifest.jsonl").string();
    std::ofstream manifest(manifest_path);
    if (!manifest) throw IoError("cannot open '" + manifest_path + "' for writing");

    for (std::size_t i = 0; i < count; ++i) {
        const Scene scene = make_scene(height, width, seed + i);
        char depth_name[32];
        char rgb_name[32];
        std::snprintf(depth_name, sizeof(depth_name), "depth_%04zu.pgm", i);
        std::snprintf(rgb_name, sizeof(rgb_name), "rgb_%04zu.ppm", i);
        const std::string depth_path = (fs::path(dir) / depth_name).string();
        const std::string rgb_path = (fs::path(dir) / rgb_name).string();
        write_image(depth_path, scene.depth, 65535);
        write_image(rgb_path, scene.rgb, 255);
        // Bare filenames: readers resolve them relative to the manifest.
        manifest << "{\"target_path\": \"" << depth_name << "\", \"guidance_path\": \""
                 << rgb_name << "\", \"gt_path\": \"" << depth_name << "\"}\n";
    }
    if (!manifest) throw IoError("short write to '" + manifest_path + "'");
    return manifest_path;
}

}  // namespace djf
