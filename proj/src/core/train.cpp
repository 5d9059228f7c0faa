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

#include "core/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/filters.hpp"
#include "core/image_io.hpp"
#include "core/parallel.hpp"

namespace djf {

namespace {

Tensor crop(const Tensor& img, std::size_t y0, std::size_t x0, std::size_t h, std::size_t w) {
    Tensor out(img.channels(), h, w);
    for (std::size_t c = 0; c < img.channels(); ++c) {
        for (std::size_t y = 0; y < h; ++y) {
            const float* src = img.channel(c) + (y0 + y) * img.width() + x0;
            std::copy(src, src + w, out.channel(c) + y * w);
        }
    }
    return out;
}

void accumulate(NetGrads& into, const NetGrads& from, float scale) {
    auto add = [scale](std::vector<LayerGradsT<float>>& a,
                       const std::vector<LayerGradsT<float>>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < a[i].weights.size(); ++j) {
                a[i].weights[j] += scale * b[i].weights[j];
            }
            for (std::size_t j = 0; j < a[i].biases.size(); ++j) {
                a[i].biases[j] += scale * b[i].biases[j];
            }
        }
    };
    add(into.layers_t, from.layers_t);
    add(into.layers_g, from.layers_g);
    add(into.layers_f, from.layers_f);
}

NetGrads zero_grads_like(const Model& model) {
    NetGrads g;
    auto mirror = [](const std::vector<ConvLayerParams>& layers) {
        std::vector<LayerGradsT<float>> out(layers.size());
        for (std::size_t i = 0; i < layers.size(); ++i) {
            out[i].weights.assign(layers[i].weights.size(), 0.0f);
            out[i].biases.assign(layers[i].biases.size(), 0.0f);
        }
        return out;
    };
    g.layers_t = mirror(model.layers_t);
    g.layers_g = mirror(model.layers_g);
    g.layers_f = mirror(model.layers_f);
    return g;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void validate(const TaskSpec& task) {
    if (task.kind == TaskSpec::Kind::upsample && task.scale < 1) {
        throw ConfigError("task: scale must be >= 1");
    }
    if (task.kind == TaskSpec::Kind::denoise && task.noise_variance < 0) {
        throw ConfigError("task: noise_variance must be >= 0");
    }
}

Tensor synthesize_target(const Tensor& gt, const Tensor& /*guidance*/, const TaskSpec& task) {
    validate(task);
    if (task.kind == TaskSpec::Kind::upsample) {
        const Tensor low = nearest_downsample(gt, task.scale);
        return bicubic_resize(low, gt.height(), gt.width());
    }
    Tensor noisy = gt;
    if (task.noise_variance > 0) {
        std::mt19937_64 rng(task.seed);
        std::normal_distribution<double> dist(0.0, std::sqrt(task.noise_variance));
        float* d = noisy.data();
        for (std::size_t i = 0; i < noisy.size(); ++i) {
            d[i] = std::clamp(d[i] + static_cast<float>(dist(rng)), 0.0f, 1.0f);
        }
    }
    return noisy;
}

std::vector<TrainPatch> sample_patches(const std::vector<SamplePair>& pairs,
                                       const TaskSpec& task, const TrainConfig& cfg) {
    validate(task);
    if (pairs.empty()) throw ConfigError("sample_patches: no source pairs");
    if (cfg.patch_size < 1) throw ConfigError("sample_patches: patch_size must be >= 1");

    struct Source {
        Tensor target;
        Tensor guidance;
        Tensor gt;
    };
    std::vector<Source> sources;
    sources.reserve(pairs.size());
    const std::size_t p = static_cast<std::size_t>(cfg.patch_size);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const SamplePair& pair = pairs[i];
        Tensor gt = read_image(pair.gt_path.empty() ? pair.target_path : pair.gt_path);
        Tensor guidance = read_image(pair.guidance_path);
        if (gt.height() != guidance.height() || gt.width() != guidance.width()) {
            throw ShapeError("sample_patches: '" + pair.guidance_path + "' " +
                             guidance.shape_str() + " does not match ground truth " +
                             gt.shape_str());
        }
        if (task.kind == TaskSpec::Kind::upsample) {
            const std::size_t s = static_cast<std::size_t>(task.scale);
            const std::size_t h = gt.height() - gt.height() % s;
            const std::size_t w = gt.width() - gt.width() % s;
            if (h == 0 || w == 0) {
                throw ShapeError("sample_patches: image smaller than scale " +
                                 std::to_string(task.scale));
            }
            if (h != gt.height() || w != gt.width()) {
                gt = crop(gt, 0, 0, h, w);
                guidance = crop(guidance, 0, 0, h, w);
            }
        }
        if (gt.height() < p || gt.width() < p) {
            throw ShapeError("sample_patches: source " + gt.shape_str() +
                             " smaller than patch size " + std::to_string(cfg.patch_size));
        }
        TaskSpec per_image = task;
        per_image.seed = mix_seed(task.seed, i);
        Tensor target = synthesize_target(gt, guidance, per_image);
        sources.push_back({std::move(target), std::move(guidance), std::move(gt)});
    }

    std::vector<TrainPatch> patches;
    patches.reserve(static_cast<std::size_t>(std::max<long>(0, cfg.patches_total)));
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, sources.size() - 1);
    for (long i = 0; i < cfg.patches_total; ++i) {
        const Source& src = sources[pick(rng)];
        std::uniform_int_distribution<std::size_t> py(0, src.gt.height() - p);
        std::uniform_int_distribution<std::size_t> px(0, src.gt.width() - p);
        const std::size_t y = py(rng);
        const std::size_t x = px(rng);
        patches.push_back({crop(src.target, y, x, p, p), crop(src.guidance, y, x, p, p),
                           crop(src.gt, y, x, p, p)});
    }
    return patches;
}

OptimizerState init_optimizer_state(const Model& model) {
    return OptimizerState{zero_grads_like(model)};
}

void sgd_step(Model& model, const NetGrads& grads, OptimizerState& state,
              const TrainConfig& cfg) {
    auto update = [&cfg](std::vector<ConvLayerParams>& layers,
                         const std::vector<LayerGradsT<float>>& g,
                         std::vector<LayerGradsT<float>>& v) {
        if (g.size() != layers.size() || v.size() != layers.size()) {
            throw ConfigError("sgd_step: gradient structure does not mirror the model");
        }
        const float lr = static_cast<float>(cfg.learning_rate);
        const float mom = static_cast<float>(cfg.momentum);
        const float wd = static_cast<float>(cfg.weight_decay);
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (g[i].weights.size() != layers[i].weights.size() ||
                g[i].biases.size() != layers[i].biases.size()) {
                throw ConfigError("sgd_step: gradient shapes do not mirror the model");
            }
            for (std::size_t j = 0; j < layers[i].weights.size(); ++j) {
                float& w = layers[i].weights[j];
                float& vel = v[i].weights[j];
                vel = mom * vel - lr * (g[i].weights[j] + wd * w);
                w += vel;
            }
            for (std::size_t j = 0; j < layers[i].biases.size(); ++j) {
                float& b = layers[i].biases[j];
                float& vel = v[i].biases[j];
                vel = mom * vel - lr * (g[i].biases[j] + wd * b);
                b += vel;
            }
        }
    };
    update(model.layers_t, grads.layers_t, state.velocity.layers_t);
    update(model.layers_g, grads.layers_g, state.velocity.layers_g);
    update(model.layers_f, grads.layers_f, state.velocity.layers_f);
}

double dataset_loss(const Model& model, const std::vector<TrainPatch>& patches, int threads) {
    if (patches.empty()) throw ConfigError("dataset_loss: empty patch list");
    std::vector<double> losses(patches.size());
    parallel_blocks(patches.size(), threads, [&](std::size_t i) {
        const Tensor out = forward(model, patches[i].target, patches[i].guidance, 1);
        losses[i] = mse_loss(out, patches[i].gt);
    });
    double acc = 0.0;
    for (double l : losses) acc += l;
    return acc / static_cast<double>(losses.size());
}

TrainResult train(const Manifest& manifest, const TaskSpec& task, const NetworkConfig& net_cfg,
                  const TrainConfig& cfg, int threads,
                  const std::function<void(const LossRecord&)>& on_record) {
    if (manifest.pairs.empty()) throw ConfigError("train: manifest is empty");
    validate(net_cfg);
    validate(task);
    if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (cfg.patch_size < net_cfg.f1) {
        throw ConfigError("train: patch_size must be >= f1 (" + std::to_string(net_cfg.f1) + ")");
    }
    if (cfg.patches_total < cfg.batch_size) {
        throw ConfigError("train: patches_total must be >= batch_size");
    }
    if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");

    const std::vector<TrainPatch> patches = sample_patches(manifest.pairs, task, cfg);
    for (const TrainPatch& patch : patches) {
        if (static_cast<int>(patch.gt.channels()) != net_cfg.target_channels ||
            static_cast<int>(patch.guidance.channels()) != net_cfg.guidance_channels) {
            throw ShapeError("train: patch channels do not match the network config");
        }
    }

    TrainResult result;
    result.model = build_network<float>(net_cfg, WeightInit::fan_in);
    OptimizerState state = init_optimizer_state(result.model);

    const long steps_per_epoch = cfg.patches_total / cfg.batch_size;
    const int decay_epoch = static_cast<int>(
        std::ceil(cfg.lr_decay_point * static_cast<double>(cfg.epochs)));
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 0x7261696eULL));
    const auto start = std::chrono::steady_clock::now();

    std::vector<NetGrads> patch_grads(static_cast<std::size_t>(cfg.batch_size));
    std::vector<double> patch_losses(static_cast<std::size_t>(cfg.batch_size));
    long iteration = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        TrainConfig step_cfg = cfg;
        if (epoch >= decay_epoch) step_cfg.learning_rate *= cfg.lr_decay_factor;
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (long step = 0; step < steps_per_epoch; ++step) {
            const std::size_t base = static_cast<std::size_t>(step) *
                                     static_cast<std::size_t>(cfg.batch_size);
            parallel_blocks(static_cast<std::size_t>(cfg.batch_size), threads,
                            [&](std::size_t b) {
                const TrainPatch& patch = patches[order[(base + b) % order.size()]];
                ForwardTrace trace;
                const Tensor out = forward(result.model, patch.target, patch.guidance, 1, &trace);
                patch_losses[b] = mse_loss(out, patch.gt);
                const Tensor grad = mse_loss_grad(out, patch.gt);
                patch_grads[b] = backward(result.model, trace, grad, 1);
            });

            NetGrads batch = zero_grads_like(result.model);
            double loss_acc = 0.0;
            const float inv_batch = 1.0f / static_cast<float>(cfg.batch_size);
            for (int b = 0; b < cfg.batch_size; ++b) {
                accumulate(batch, patch_grads[static_cast<std::size_t>(b)], inv_batch);
                loss_acc += patch_losses[static_cast<std::size_t>(b)];
            }
            const double batch_loss = loss_acc / cfg.batch_size;
            if (!std::isfinite(batch_loss)) {
                throw NumericError("train: non-finite loss at iteration " +
                                   std::to_string(iteration));
            }
            sgd_step(result.model, batch, state, step_cfg);

            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const LossRecord record{iteration, batch_loss, seconds};
            result.records.push_back(record);
            if (on_record) on_record(record);
            ++iteration;
        }
    }

    result.checkpoint = serialize(result.model);
    return result;
}

void write_loss_csv(const std::string& path, const std::vector<LossRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "iteration,loss,seconds\n";
    for (const LossRecord& r : records) {
        out << r.iteration << "," << r.loss << "," << r.seconds << "\n";
    }
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace djf
