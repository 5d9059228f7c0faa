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

#ifndef DJF_CORE_NET_HPP
#define DJF_CORE_NET_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "core/conv.hpp"
#include "core/error.hpp"
#include "core/tensor.hpp"

namespace djf {

/// Hyper-parameters of the joint filter: two feature branches (target,
/// guidance) whose outputs are concatenated and regressed by a fusion branch,
/// optionally with a residual skip from the target input to the output.
struct NetworkConfig {
    int n1 = 96;              // channels after the first layer of each sub-network
    int n2 = 48;              // channels of the middle layers
    int n3 = 1;               // channels produced by each feature branch
    int f1 = 9;               // kernel size, first layer
    int f2 = 1;               // kernel size, middle layers
    int f3 = 5;               // kernel size, last layer
    int depth_t = 3;          // layers in the target branch
    int depth_g = 3;          // layers in the guidance branch (must equal depth_t)
    int depth_f = 3;          // layers in the fusion branch
    int target_channels = 1;
    int guidance_channels = 3;
    bool skip_connection = true;
    std::uint64_t seed = 0;
};

/// Shape of one layer in a sub-network plan.
struct LayerShape {
    int in_channels;
    int out_channels;
    int kernel;
};

/// Throws ConfigError when the configuration violates an invariant
/// (even kernels, mismatched branch depths, non-positive counts).
void validate(const NetworkConfig& cfg);

/// Layer plan for a feature branch with the given input channel count.
/// Depth 0 yields an empty plan (the branch passes its input through).
std::vector<LayerShape> branch_plan(const NetworkConfig& cfg, int input_channels);

/// Layer plan for the fusion branch. Its input is the channel concatenation
/// of the two branch outputs (or of the raw target/guidance pair when the
/// branches have depth 0); its output has target_channels channels.
std::vector<LayerShape> fusion_plan(const NetworkConfig& cfg);

/// Total number of learnable parameters: sum over layers of out*in*k^2 + out.
std::size_t param_count(const NetworkConfig& cfg);

/// Weight initialization family. `flat_small` draws every weight from
/// N(0, 1e-3); `fan_in` scales each layer as N(0, sqrt(2/fan_in)) with a
/// small final fusion layer so the initial residual stays near zero. The
/// flat scheme makes a freshly built model behave as the identity filter;
/// the fan-in scheme is what training starts from, since gradients through
/// three 1e-3-scale layers are too small to move in any reasonable number
/// of steps.
enum class WeightInit { flat_small, fan_in };

/// Standard deviation of the flat_small initialization.
inline constexpr double kWeightInitStdDev = 1e-3;

/// The full parameter set of the three sub-networks.
template <class S>
struct ModelT {
    NetworkConfig config;
    std::vector<ConvLayerParamsT<S>> layers_t;
    std::vector<ConvLayerParamsT<S>> layers_g;
    std::vector<ConvLayerParamsT<S>> layers_f;
};

using Model = ModelT<float>;
using ModelD = ModelT<double>;

/// Per-layer activations recorded by a traced forward pass, as needed by the
/// backward pass and by feature-map dumps.
template <class S>
struct SubnetTraceT {
    TensorT<S> input;                // what the first layer saw
    std::vector<TensorT<S>> pre;     // conv outputs
    std::vector<TensorT<S>> post;    // after ReLU (same as pre for the last layer)
};

template <class S>
struct ForwardTraceT {
    SubnetTraceT<S> target;
    SubnetTraceT<S> guidance;
    SubnetTraceT<S> fusion;
    TensorT<S> residual;             // fusion output before the skip addition
    TensorT<S> output;
};

using ForwardTrace = ForwardTraceT<float>;

/// Parameter gradients mirroring a model's layer structure.
template <class S>
struct LayerGradsT {
    std::vector<S> weights;
    std::vector<S> biases;
};

template <class S>
struct NetGradsT {
    std::vector<LayerGradsT<S>> layers_t;
    std::vector<LayerGradsT<S>> layers_g;
    std::vector<LayerGradsT<S>> layers_f;
};

using NetGrads = NetGradsT<float>;

namespace detail {

template <class S>
std::vector<ConvLayerParamsT<S>> build_subnet(const std::vector<LayerShape>& plan,
                                              std::mt19937_64& rng,
                                              const std::vector<double>& stds) {
    std::vector<ConvLayerParamsT<S>> layers;
    layers.reserve(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const LayerShape& ls = plan[i];
        std::normal_distribution<double> dist(0.0, stds[i]);
        ConvLayerParamsT<S> layer;
        layer.out_channels = static_cast<std::size_t>(ls.out_channels);
        layer.in_channels = static_cast<std::size_t>(ls.in_channels);
        layer.kernel_size = static_cast<std::size_t>(ls.kernel);
        layer.weights.resize(layer.out_channels * layer.in_channels * layer.kernel_size *
                             layer.kernel_size);
        for (S& w : layer.weights) w = static_cast<S>(dist(rng));
        layer.biases.assign(layer.out_channels, S(0));
        layers.push_back(std::move(layer));
    }
    return layers;
}

inline std::vector<double> init_stds(const std::vector<LayerShape>& plan, WeightInit init,
                                     bool is_fusion) {
    std::vector<double> stds(plan.size(), kWeightInitStdDev);
    if (init == WeightInit::fan_in) {
        for (std::size_t i = 0; i < plan.size(); ++i) {
            const double fan =
                static_cast<double>(plan[i].in_channels) * plan[i].kernel * plan[i].kernel;
            stds[i] = std::sqrt(2.0 / fan);
        }
        if (is_fusion && !stds.empty()) stds.back() = kWeightInitStdDev;
    }
    return stds;
}

// Runs one sub-network; ReLU after every layer except the last. When `trace`
// is non-null every pre/post activation is recorded.
template <class S>
TensorT<S> run_subnet(const std::vector<ConvLayerParamsT<S>>& layers, const TensorT<S>& input,
                      int threads, SubnetTraceT<S>* trace) {
    if (trace) trace->input = input;
    TensorT<S> x = input;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        TensorT<S> pre = conv2d_forward(x, layers[i], PaddingMode::same, threads);
        const bool last = (i + 1 == layers.size());
        if (trace) {
            TensorT<S> post = last ? pre : relu_forward(pre);
            trace->pre.push_back(std::move(pre));
            trace->post.push_back(post);
            x = std::move(post);
        } else {
            x = std::move(pre);
            if (!last) {
                S* d = x.data();
                for (std::size_t j = 0; j < x.size(); ++j) d[j] = d[j] > S(0) ? d[j] : S(0);
            }
        }
    }
    return x;
}

// Backward through one sub-network. Returns the gradient w.r.t. the subnet
// input; parameter gradients are appended per layer into `out` (front to
// back order, matching the layer list).
template <class S>
TensorT<S> backprop_subnet(const std::vector<ConvLayerParamsT<S>>& layers,
                           const SubnetTraceT<S>& trace, TensorT<S> grad, int threads,
                           std::vector<LayerGradsT<S>>& out) {
    out.resize(layers.size());
    for (std::size_t idx = layers.size(); idx-- > 0;) {
        const bool last = (idx + 1 == layers.size());
        if (!last) grad = relu_backward(trace.pre[idx], grad);
        const TensorT<S>& layer_in = idx == 0 ? trace.input : trace.post[idx - 1];
        ConvGradsT<S> g =
            conv2d_backward(layer_in, layers[idx], PaddingMode::same, grad, threads);
        out[idx].weights = std::move(g.weights);
        out[idx].biases = std::move(g.biases);
        grad = std::move(g.input);
    }
    return grad;
}

}  // namespace detail

/// Builds a model with zero-mean Gaussian weights and zero biases;
/// deterministic for a given config.seed and init scheme.
template <class S>
ModelT<S> build_network(const NetworkConfig& cfg, WeightInit init = WeightInit::flat_small) {
    validate(cfg);
    ModelT<S> model;
    model.config = cfg;
    std::mt19937_64 rng(cfg.seed);
    const auto plan_t = branch_plan(cfg, cfg.target_channels);
    const auto plan_g = branch_plan(cfg, cfg.guidance_channels);
    const auto plan_f = fusion_plan(cfg);
    model.layers_t = detail::build_subnet<S>(plan_t, rng, detail::init_stds(plan_t, init, false));
    model.layers_g = detail::build_subnet<S>(plan_g, rng, detail::init_stds(plan_g, init, false));
    model.layers_f = detail::build_subnet<S>(plan_f, rng, detail::init_stds(plan_f, init, true));
    return model;
}

/// Full forward pass. Output spatial dims equal the input's; with the skip
/// connection on, output = target + fusion(concat(branch_t, branch_g)).
template <class S>
TensorT<S> forward(const ModelT<S>& model, const TensorT<S>& target,
                   const TensorT<S>& guidance, int threads = 1,
                   ForwardTraceT<S>* trace = nullptr) {
    const NetworkConfig& cfg = model.config;
    if (static_cast<int>(target.channels()) != cfg.target_channels) {
        throw ShapeError("forward: target has " + std::to_string(target.channels()) +
                         " channels, config expects " + std::to_string(cfg.target_channels));
    }
    if (static_cast<int>(guidance.channels()) != cfg.guidance_channels) {
        throw ShapeError("forward: guidance has " + std::to_string(guidance.channels()) +
                         " channels, config expects " + std::to_string(cfg.guidance_channels));
    }
    if (target.height() != guidance.height() || target.width() != guidance.width()) {
        throw ShapeError("forward: target " + target.shape_str() + " and guidance " +
                         guidance.shape_str() + " differ spatially");
    }

    TensorT<S> feat_t = model.layers_t.empty()
                            ? target
                            : detail::run_subnet(model.layers_t, target, threads,
                                                 trace ? &trace->target : nullptr);
    TensorT<S> feat_g = model.layers_g.empty()
                            ? guidance
                            : detail::run_subnet(model.layers_g, guidance, threads,
                                                 trace ? &trace->guidance : nullptr);
    TensorT<S> merged = concat_channels(feat_t, feat_g);
    TensorT<S> residual = detail::run_subnet(model.layers_f, merged, threads,
                                             trace ? &trace->fusion : nullptr);

    TensorT<S> output = residual;
    if (cfg.skip_connection) {
        S* out = output.data();
        const S* t = target.data();
        for (std::size_t i = 0; i < output.size(); ++i) out[i] += t[i];
    }
    if (trace) {
        trace->residual = std::move(residual);
        trace->output = output;
    }
    return output;
}

/// Backward pass producing parameter gradients for all three sub-networks.
/// The skip connection routes grad_output past the fusion branch unchanged,
/// so it only affects the (unreturned) gradient w.r.t. the target input.
template <class S>
NetGradsT<S> backward(const ModelT<S>& model, const ForwardTraceT<S>& trace,
                      const TensorT<S>& grad_output, int threads = 1) {
    if (trace.residual.empty()) {
        throw ConfigError("backward: trace was not recorded by forward(keep_trace)");
    }
    require_same_shape(grad_output, trace.residual, "backward(grad_output)");

    NetGradsT<S> grads;
    TensorT<S> grad_merged =
        detail::backprop_subnet(model.layers_f, trace.fusion, grad_output, threads,
                                grads.layers_f);

    if (!model.layers_t.empty()) {
        const std::size_t n_t = model.layers_t.back().out_channels;
        TensorT<S> grad_t(n_t, grad_merged.height(), grad_merged.width());
        TensorT<S> grad_g(grad_merged.channels() - n_t, grad_merged.height(),
                          grad_merged.width());
        std::copy(grad_merged.data(), grad_merged.data() + grad_t.size(), grad_t.data());
        std::copy(grad_merged.data() + grad_t.size(), grad_merged.data() + grad_merged.size(),
                  grad_g.data());
        detail::backprop_subnet(model.layers_t, trace.target, std::move(grad_t), threads,
                                grads.layers_t);
        detail::backprop_subnet(model.layers_g, trace.guidance, std::move(grad_g), threads,
                                grads.layers_g);
    }
    return grads;
}

/// Number of parameters held by a built model (matches param_count(config)).
template <class S>
std::size_t model_param_count(const ModelT<S>& model) {
    std::size_t n = 0;
    for (const auto* layers : {&model.layers_t, &model.layers_g, &model.layers_f}) {
        for (const auto& l : *layers) n += l.weights.size() + l.biases.size();
    }
    return n;
}

/// Flat parameter order: sub-network (target, guidance, fusion), layers
/// front to back, weights then biases. This is also the checkpoint order.
template <class S, class Fn>
void for_each_param_vector(ModelT<S>& model, Fn&& fn) {
    for (auto* layers : {&model.layers_t, &model.layers_g, &model.layers_f}) {
        for (auto& l : *layers) {
            fn(l.weights);
            fn(l.biases);
        }
    }
}

template <class S>
std::vector<S> flatten_params(const ModelT<S>& model) {
    std::vector<S> out;
    out.reserve(model_param_count(model));
    for (const auto* layers : {&model.layers_t, &model.layers_g, &model.layers_f}) {
        for (const auto& l : *layers) {
            out.insert(out.end(), l.weights.begin(), l.weights.end());
            out.insert(out.end(), l.biases.begin(), l.biases.end());
        }
    }
    return out;
}

template <class S>
void unflatten_params(ModelT<S>& model, const std::vector<S>& flat) {
    if (flat.size() != model_param_count(model)) {
        throw ConfigError("unflatten_params: length mismatch");
    }
    std::size_t pos = 0;
    for_each_param_vector(model, [&](std::vector<S>& v) {
        std::copy(flat.begin() + pos, flat.begin() + pos + v.size(), v.begin());
        pos += v.size();
    });
}

template <class S>
std::vector<S> flatten_grads(const NetGradsT<S>& grads) {
    std::vector<S> out;
    for (const auto* layers : {&grads.layers_t, &grads.layers_g, &grads.layers_f}) {
        for (const auto& l : *layers) {
            out.insert(out.end(), l.weights.begin(), l.weights.end());
            out.insert(out.end(), l.biases.begin(), l.biases.end());
        }
    }
    return out;
}

}  // namespace djf

#endif  // DJF_CORE_NET_HPP
