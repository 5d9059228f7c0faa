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

#ifndef DJF_CORE_MANIFEST_HPP
#define DJF_CORE_MANIFEST_HPP

#include <string>
#include <vector>

namespace djf {

/// Reporting conventions for RMSE: unit_scale maps internal [0,1] samples to
/// reported units; mask_missing ignores pixels whose ground truth equals the
/// pair's missing-value sentinel.
struct EvalConvention {
    double unit_scale = 1.0;
    bool mask_missing = false;
};

/// One dataset entry binding a degraded/clean/guidance triple on disk.
/// depth_scale converts the pair's normalized intensities to physical units
/// and multiplies the convention's unit_scale during evaluation.
struct SamplePair {
    std::string target_path;
    std::string guidance_path;
    std::string gt_path;          // optional; empty when absent
    double depth_scale = 1.0;
    double missing_value = 0.0;
};

struct Manifest {
    std::string dataset;
    EvalConvention convention;
    std::vector<SamplePair> pairs;
};

/// Parses a JSON-Lines manifest: one SamplePair object per non-empty line.
/// Unknown keys are ignored; malformed lines raise FormatError naming the
/// 1-based line number. The dataset name defaults to the file stem.
Manifest read_manifest(const std::string& path);

}  // namespace djf

#endif  // DJF_CORE_MANIFEST_HPP
