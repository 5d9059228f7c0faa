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

#ifndef DJF_CORE_EVAL_HPP
#define DJF_CORE_EVAL_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/manifest.hpp"
#include "core/tensor.hpp"
#include "core/train.hpp"

namespace djf {

struct ImageResult {
    std::size_t index = 0;
    std::string path;
    double rmse = 0.0;
    double seconds = 0.0;
};

struct EvalReport {
    std::vector<ImageResult> images;
    double mean = 0.0;
    double stddev = 0.0;   // sample standard deviation (0 for a single image)
    std::size_t skipped = 0;
};

/// Root-mean-square error over unmasked pixels, with differences scaled into
/// reported units: sqrt(mean((unit_scale * (pred - gt))^2)). A mask, when
/// given, must match the dims and contain 0/1 samples; an all-zero mask is an
/// error.
double rmse(const Tensor& pred, const Tensor& gt, const Tensor* mask,
            const EvalConvention& conv);

/// A joint filter under evaluation: receives the degraded target (low-res for
/// upsampling, full-res noisy for denoising) plus guidance, returns the
/// restored image at guidance resolution.
using FilterFn = std::function<Tensor(const Tensor& target, const Tensor& guidance,
                                      const TaskSpec& task)>;

/// Degrades each ground truth per the task, runs the filter, and scores
/// per-image RMSE in the manifest's units (convention unit_scale times the
/// pair's depth_scale). Pixels where gt equals the pair's missing sentinel
/// are ignored when mask_missing is set. Unreadable entries are counted in
/// `skipped` and otherwise ignored.
EvalReport eval_dataset(const FilterFn& filter, const Manifest& manifest, const TaskSpec& task,
                        const EvalConvention& conv);

/// Median wall-clock seconds of the filter on a synthetic h x w scene after
/// one warm-up run. Requires repetitions >= 3.
double benchmark_runtime(const FilterFn& filter, const TaskSpec& task, std::size_t height,
                         std::size_t width, int repetitions);

void write_report_json(const std::string& path, const EvalReport& report,
                       const std::string& dataset, const std::string& task_name);
void write_report_csv(const std::string& path, const EvalReport& report);

}  // namespace djf

#endif  // DJF_CORE_EVAL_HPP
