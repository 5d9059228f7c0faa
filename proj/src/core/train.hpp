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

#ifndef DJF_CORE_TRAIN_HPP
#define DJF_CORE_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "core/manifest.hpp"
#include "core/net.hpp"
#include "core/tensor.hpp"

namespace djf {

/// Degradation recipe used to synthesize the target from the ground truth.
struct TaskSpec {
    enum class Kind { upsample, denoise };
    Kind kind = Kind::upsample;
    int scale = 8;                 // upsample only; one of the usual 4/8/16
    double noise_variance = 1e-3;  // denoise only, on the [0,1] intensity scale
    std::uint64_t seed = 0;
};

void validate(const TaskSpec& task);

/// Mini-batch SGD settings. The learning rate drops by lr_decay_factor once
/// ceil(lr_decay_point * epochs) epochs have completed.
struct TrainConfig {
    int patch_size = 32;
    long patches_total = 160000;
    int batch_size = 128;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    int epochs = 1;
    double lr_decay_factor = 0.1;
    double lr_decay_point = 0.8;
    std::uint64_t seed = 0;
};

struct TrainPatch {
    Tensor target;
    Tensor guidance;
    Tensor gt;
};

/// Momentum buffers mirroring a model's parameter structure.
struct OptimizerState {
    NetGrads velocity;
};

struct LossRecord {
    long iteration = 0;
    double loss = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    Model model;
    std::vector<std::uint8_t> checkpoint;
    std::vector<LossRecord> records;
};

/// Derives a stream-separating seed for item `index` of a seeded family.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Synthesizes the degraded target on the full-resolution grid:
/// upsample -- nearest-neighbor downsample by task.scale, then bicubic resize
/// back to the original dims; denoise -- gt plus seeded Gaussian noise of the
/// configured variance, clamped to [0,1].
Tensor synthesize_target(const Tensor& gt, const Tensor& guidance, const TaskSpec& task);

/// Loads every pair, degrades at full-image level, and cuts patches_total
/// patches at seeded uniform positions. For upsampling, images are cropped to
/// the largest scale-divisible size before degradation. The clean source is
/// gt_path when present, else target_path.
std::vector<TrainPatch> sample_patches(const std::vector<SamplePair>& pairs,
                                       const TaskSpec& task, const TrainConfig& cfg);

/// Mean squared error over all elements, and its gradient 2(output - gt)/N.
template <class S>
S mse_loss(const TensorT<S>& output, const TensorT<S>& gt) {
    require_same_shape(output, gt, "mse_loss");
    double acc = 0.0;
    const S* o = output.data();
    const S* g = gt.data();
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double d = static_cast<double>(o[i]) - static_cast<double>(g[i]);
        acc += d * d;
    }
    return static_cast<S>(acc / static_cast<double>(output.size()));
}

template <class S>
TensorT<S> mse_loss_grad(const TensorT<S>& output, const TensorT<S>& gt) {
    require_same_shape(output, gt, "mse_loss_grad");
    TensorT<S> grad(output.channels(), output.height(), output.width());
    const S scale = S(2) / static_cast<S>(output.size());
    const S* o = output.data();
    const S* g = gt.data();
    S* d = grad.data();
    for (std::size_t i = 0; i < output.size(); ++i) d[i] = scale * (o[i] - g[i]);
    return grad;
}

OptimizerState init_optimizer_state(const Model& model);

/// One SGD-with-momentum update:
///   v <- momentum*v - lr*(g + weight_decay*w);  w <- w + v.
void sgd_step(Model& model, const NetGrads& grads, OptimizerState& state,
              const TrainConfig& cfg);

/// Mean loss of the model over a patch list (no parameter updates).
double dataset_loss(const Model& model, const std::vector<TrainPatch>& patches, int threads = 1);

/// Joint training of all three sub-networks by mini-batch SGD on the squared
/// loss, from fan-in-scaled initialization. Deterministic for fixed seeds at
/// any thread count: patch gradients are computed independently and reduced
/// in batch order.
TrainResult train(const Manifest& manifest, const TaskSpec& task, const NetworkConfig& net_cfg,
                  const TrainConfig& cfg, int threads = 1,
                  const std::function<void(const LossRecord&)>& on_record = nullptr);

/// Writes a loss curve as "iteration,loss,seconds" CSV.
void write_loss_csv(const std::string& path, const std::vector<LossRecord>& records);

}  // namespace djf

#endif  // DJF_CORE_TRAIN_HPP
