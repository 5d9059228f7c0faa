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

#include "core/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "core/error.hpp"
#include "core/filters.hpp"
#include "core/image_io.hpp"

namespace djf {

namespace {

Tensor crop_to(const Tensor& img, std::size_t h, std::size_t w) {
    if (img.height() == h && img.width() == w) return img;
    Tensor out(img.channels(), h, w);
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t y = 0; y < h; ++y) {
            const float* src = img.channel(c) + y * img.width();
            std::copy(src, src + w, out.channel(c) + y * w);
        }
    }
    return out;
}

}  // namespace

double rmse(const Tensor& pred, const Tensor& gt, const Tensor* mask,
            const EvalConvention& conv) {
    require_same_shape(pred, gt, "rmse");
    if (!(conv.unit_scale > 0)) throw ConfigError("rmse: unit_scale must be > 0");
    if (mask) {
        require_same_shape(*mask, gt, "rmse(mask)");
        for (std::size_t i = 0; i < mask->size(); ++i) {
            const float m = mask->data()[i];
            if (m != 0.0f && m != 1.0f) throw ConfigError("rmse: mask must be 0/1 valued");
        }
    }
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (mask && mask->data()[i] == 0.0f) continue;
        const double d =
            conv.unit_scale * (static_cast<double>(pred.data()[i]) - gt.data()[i]);
        acc += d * d;
        ++count;
    }
    if (count == 0) throw ConfigError("rmse: mask excludes every pixel");
    return std::sqrt(acc / static_cast<double>(count));
}

EvalReport eval_dataset(const FilterFn& filter, const Manifest& manifest, const TaskSpec& task,
                        const EvalConvention& conv) {
    validate(task);
    if (manifest.pairs.empty()) throw ConfigError("eval_dataset: manifest is empty");

    EvalReport report;
    for (std::size_t i = 0; i < manifest.pairs.size(); ++i) {
        const SamplePair& pair = manifest.pairs[i];
        Tensor gt, guidance;
        try {
            gt = read_image(pair.gt_path.empty() ? pair.target_path : pair.gt_path);
            guidance = read_image(pair.guidance_path);
        } catch (const IoError&) {
            ++report.skipped;
            continue;
        } catch (const FormatError&) {
            ++report.skipped;
            continue;
        }
        if (gt.height() != guidance.height() || gt.width() != guidance.width()) {
            ++report.skipped;
            continue;
        }
        if (task.kind == TaskSpec::Kind::upsample) {
            const std::size_t s = static_cast<std::size_t>(task.scale);
            const std::size_t h = gt.height() - gt.height() % s;
            const std::size_t w = gt.width() - gt.width() % s;
            if (h == 0 || w == 0) {
                ++report.skipped;
                continue;
            }
            gt = crop_to(gt, h, w);
            guidance = crop_to(guidance, h, w);
        }

        Tensor degraded;
        TaskSpec per_image = task;
        per_image.seed = mix_seed(task.seed, i);
        if (task.kind == TaskSpec::Kind::upsample) {
            degraded = nearest_downsample(gt, task.scale);
        } else {
            degraded = synthesize_target(gt, guidance, per_image);
        }

        std::optional<Tensor> mask;
        if (conv.mask_missing) {
            Tensor m(gt.channels(), gt.height(), gt.width());
            const float sentinel = static_cast<float>(pair.missing_value);
            for (std::size_t j = 0; j < gt.size(); ++j) {
                m.data()[j] = gt.data()[j] == sentinel ? 0.0f : 1.0f;
            }
            mask = std::move(m);
        }

        const auto t0 = std::chrono::steady_clock::now();
        const Tensor pred = filter(degraded, guidance, per_image);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        EvalConvention scaled = conv;
        scaled.unit_scale = conv.unit_scale * pair.depth_scale;
        const double err = rmse(pred, gt, mask ? &*mask : nullptr, scaled);
        report.images.push_back({i, pair.target_path, err, seconds});
    }

    if (!report.images.empty()) {
        double acc = 0.0;
        for (const ImageResult& r : report.images) acc += r.rmse;
        report.mean = acc / static_cast<double>(report.images.size());
        if (report.images.size() > 1) {
            double var = 0.0;
            for (const ImageResult& r : report.images) {
                const double d = r.rmse - report.mean;
                var += d * d;
            }
            report.stddev = std::sqrt(var / static_cast<double>(report.images.size() - 1));
        }
    }
    return report;
}

double benchmark_runtime(const FilterFn& filter, const TaskSpec& task, std::size_t height,
                         std::size_t width, int repetitions) {
    validate(task);
    if (repetitions < 3) throw ConfigError("benchmark_runtime: repetitions must be >= 3");

    // Deterministic synthetic scene: a smooth ramp with a few random steps.
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    std::size_t h = height, w = width;
    if (task.kind == TaskSpec::Kind::upsample) {
        const std::size_t s = static_cast<std::size_t>(task.scale);
        h -= h % s;
        w -= w % s;
    }
    Tensor gt(1, h, w);
    for (std::size_t i = 0; i < gt.size(); ++i) gt.data()[i] = uni(rng);
    Tensor guidance(3, h, w);
    for (std::size_t i = 0; i < guidance.size(); ++i) guidance.data()[i] = uni(rng);
    Tensor degraded = task.kind == TaskSpec::Kind::upsample
                          ? nearest_downsample(gt, task.scale)
                          : synthesize_target(gt, guidance, task);

    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    (void)filter(degraded, guidance, task);  // warm-up
    for (int r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)filter(degraded, guidance, task);
        times.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    return n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

void write_report_json(const std::string& path, const EvalReport& report,
                       const std::string& dataset, const std::string& task_name) {
    nlohmann::json j;
    j["dataset"] = dataset;
    j["task"] = task_name;
    j["mean_rmse"] = report.mean;
    j["stddev_rmse"] = report.stddev;
    j["skipped"] = report.skipped;
    j["images"] = nlohmann::json::array();
    for (const ImageResult& r : report.images) {
        j["images"].push_back({{"index", r.index},
                               {"target_path", r.path},
                               {"rmse", r.rmse},
                               {"seconds", r.seconds}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write to '" + path + "'");
}

void write_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "index,target_path,rmse,seconds\n";
    for (const ImageResult& r : report.images) {
        out << r.index << "," << r.path << "," << r.rmse << "," << r.seconds << "\n";
    }
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace djf
