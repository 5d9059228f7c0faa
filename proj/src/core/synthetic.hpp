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

#ifndef DJF_CORE_SYNTHETIC_HPP
#define DJF_CORE_SYNTHETIC_HPP

#include <cstdint>
#include <string>

#include "core/manifest.hpp"
#include "core/tensor.hpp"

namespace djf {

/// A synthetic depth/RGB pair: piecewise-constant depth built from stacked
/// rectangles, with an RGB rendering whose color edges coincide exactly with
/// the depth discontinuities. Useful for smoke training and demos when no
/// real RGB-D data is at hand.
struct Scene {
    Tensor depth;  // 1 channel
    Tensor rgb;    // 3 channels
};

Scene make_scene(std::size_t height, std::size_t width, std::uint64_t seed);

/// Writes `count` scenes under `dir` as 16-bit PGM depth plus 8-bit PPM color
/// and a JSON-Lines manifest binding them. Returns the manifest path.
std::string write_scene_dataset(const std::string& dir, std::size_t count, std::size_t height,
                                std::size_t width, std::uint64_t seed);

}  // namespace djf

#endif  // DJF_CORE_SYNTHETIC_HPP
