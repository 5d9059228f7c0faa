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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/checkpoint.hpp"
#include "core/grad_check.hpp"
#include "core/net.hpp"
#include "core/train.hpp"
#include "support/test_util.hpp"

using namespace djf;
using test::bitwise_equal;
using test::max_abs_diff;
using test::random_tensor;

namespace {

NetworkConfig tiny_config() {
    NetworkConfig cfg;
    cfg.n1 = 2;
    cfg.n2 = 2;
    cfg.n3 = 1;
    cfg.f1 = 3;
    cfg.f2 = 1;
    cfg.f3 = 3;
    cfg.guidance_channels = 1;
    return cfg;
}

template <class S>
void randomize_params(ModelT<S>& model, std::uint64_t seed, double scale = 0.1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, scale);
    for_each_param_vector(model, [&](std::vector<S>& v) {
        for (S& x : v) x = static_cast<S>(dist(rng));
    });
}

template <class S>
void zero_subnet(std::vector<ConvLayerParamsT<S>>& layers) {
    for (auto& l : layers) {
        std::fill(l.weights.begin(), l.weights.end(), S(0));
        std::fill(l.biases.begin(), l.biases.end(), S(0));
    }
}

}  // namespace

TEST_CASE("config validation") {
    NetworkConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.f1 = 8;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = NetworkConfig{};
    cfg.depth_t = 2;
    CHECK_THROWS_AS(validate(cfg), ConfigError);  // depth_g still 3
    cfg.depth_g = 2;
    CHECK_NOTHROW(validate(cfg));
    cfg = NetworkConfig{};
    cfg.n1 = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("build_network is deterministic per seed") {
    NetworkConfig cfg;
    cfg.seed = 1234;
    const Model a = build_network<float>(cfg);
    const Model b = build_network<float>(cfg);
    CHECK(serialize(a) == serialize(b));
    cfg.seed = 1235;
    const Model c = build_network<float>(cfg);
    CHECK(serialize(a) != serialize(c));
}

TEST_CASE("param_count: default configuration") {
    CHECK(param_count(NetworkConfig{}) == 64515);
}

TEST_CASE("param_count: one-layer arithmetic") {
    // out*in*k^2 + out for a single 1x1 layer mapping 1 -> 1 channel.
    ConvLayerParams layer;
    layer.out_channels = 1;
    layer.in_channels = 1;
    layer.kernel_size = 1;
    layer.weights.assign(1, 0.0f);
    layer.biases.assign(1, 0.0f);
    CHECK(layer.weights.size() + layer.biases.size() == 2);
}

TEST_CASE("param_count: doubling n1 with f2=1 scales head layers linearly") {
    NetworkConfig cfg;  // f2 == 1 by default
    auto heads = [](const NetworkConfig& c) {
        // closed form: the three layer-1 weight blocks plus the three
        // layer-2 weight blocks, which are the only n1-dependent weights.
        const std::size_t l1 = static_cast<std::size_t>(c.n1) *
                               (c.target_channels + c.guidance_channels + 2 * c.n3) * c.f1 * c.f1;
        const std::size_t l2 = 3ull * c.n2 * c.n1;  // f2 = 1
        return l1 + l2;
    };
    NetworkConfig doubled = cfg;
    doubled.n1 *= 2;
    const std::size_t base_rest = param_count(cfg) - heads(cfg) -
                                  3ull * cfg.n1;  // minus layer-1 biases
    const std::size_t doubled_rest =
        param_count(doubled) - heads(doubled) - 3ull * doubled.n1;
    CHECK(base_rest == doubled_rest);
    CHECK(heads(doubled) == 2 * heads(cfg));
}

TEST_CASE("forward: zeroed fusion with skip reproduces the target bitwise") {
    Model model = build_network<float>(tiny_config());
    randomize_params(model, 99);
    zero_subnet(model.layers_f);
    const Tensor target = random_tensor<float>(1, 9, 8, 1);
    const Tensor guidance = random_tensor<float>(1, 9, 8, 2);
    const Tensor out = forward(model, target, guidance);
    CHECK(bitwise_equal(out, target));
}

TEST_CASE("forward: all parameters zero without skip gives zeros") {
    NetworkConfig cfg = tiny_config();
    cfg.skip_connection = false;
    Model model = build_network<float>(cfg);
    for (auto* layers : {&model.layers_t, &model.layers_g, &model.layers_f}) {
        zero_subnet(*layers);
    }
    const Tensor out = forward(model, random_tensor<float>(1, 6, 6, 3),
                               random_tensor<float>(1, 6, 6, 4));
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == 0.0f);
}

TEST_CASE("forward equals a hand-composed chain of tensor ops") {
    NetworkConfig cfg = tiny_config();
    Model model = build_network<float>(cfg);
    randomize_params(model, 7);
    const Tensor target = random_tensor<float>(1, 5, 5, 8);
    const Tensor guidance = random_tensor<float>(1, 5, 5, 9);

    // Independent composition of the same architecture.
    Tensor t = target;
    for (std::size_t i = 0; i < model.layers_t.size(); ++i) {
        t = conv2d_forward(t, model.layers_t[i], PaddingMode::same);
        if (i + 1 < model.layers_t.size()) t = relu_forward(t);
    }
    Tensor g = guidance;
    for (std::size_t i = 0; i < model.layers_g.size(); ++i) {
        g = conv2d_forward(g, model.layers_g[i], PaddingMode::same);
        if (i + 1 < model.layers_g.size()) g = relu_forward(g);
    }
    Tensor f = concat_channels(t, g);
    for (std::size_t i = 0; i < model.layers_f.size(); ++i) {
        f = conv2d_forward(f, model.layers_f[i], PaddingMode::same);
        if (i + 1 < model.layers_f.size()) f = relu_forward(f);
    }
    for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] += target.data()[i];

    CHECK(bitwise_equal(forward(model, target, guidance), f));
}

TEST_CASE("forward is pure and deterministic") {
    Model model = build_network<float>(tiny_config());
    randomize_params(model, 13);
    const Tensor target = random_tensor<float>(1, 12, 10, 14);
    const Tensor guidance = random_tensor<float>(1, 12, 10, 15);
    CHECK(bitwise_equal(forward(model, target, guidance), forward(model, target, guidance)));
    for (int threads : {2, 4}) {
        CHECK(bitwise_equal(forward(model, target, guidance),
                            forward(model, target, guidance, threads)));
    }
}

TEST_CASE("forward rejects shape and channel mismatches") {
    Model model = build_network<float>(NetworkConfig{});
    CHECK_THROWS_AS(forward(model, random_tensor<float>(2, 8, 8, 1),
                            random_tensor<float>(3, 8, 8, 2)),
                    ShapeError);
    CHECK_THROWS_AS(forward(model, random_tensor<float>(1, 8, 8, 1),
                            random_tensor<float>(1, 8, 8, 2)),
                    ShapeError);
    CHECK_THROWS_AS(forward(model, random_tensor<float>(1, 8, 8, 1),
                            random_tensor<float>(3, 9, 8, 2)),
                    ShapeError);
}

TEST_CASE("argument roles are asymmetric") {
    NetworkConfig cfg = tiny_config();  // 1-channel target and guidance
    Model model = build_network<float>(cfg);
    randomize_params(model, 23);
    const Tensor a = random_tensor<float>(1, 7, 7, 24);
    const Tensor b = random_tensor<float>(1, 7, 7, 25);
    const Tensor ab = forward(model, a, b);
    const Tensor ba = forward(model, b, a);
    CHECK(max_abs_diff(ab, ba) > 1e-6);
}

TEST_CASE("backward: zero grad_output yields zero parameter gradients") {
    Model model = build_network<float>(tiny_config());
    randomize_params(model, 31);
    const Tensor target = random_tensor<float>(1, 6, 6, 32);
    const Tensor guidance = random_tensor<float>(1, 6, 6, 33);
    ForwardTrace trace;
    (void)forward(model, target, guidance, 1, &trace);
    const NetGrads grads = backward(model, trace, Tensor(1, 6, 6));
    for (float v : flatten_grads(grads)) CHECK(v == 0.0f);
}

TEST_CASE("backward: chain-rule structure with a zeroed fusion branch") {
    Model model = build_network<float>(tiny_config());
    randomize_params(model, 41);
    zero_subnet(model.layers_f);
    const Tensor target = random_tensor<float>(1, 8, 8, 42);
    const Tensor guidance = random_tensor<float>(1, 8, 8, 43);
    ForwardTrace trace;
    const Tensor out = forward(model, target, guidance, 1, &trace);
    const Tensor grad_out = random_tensor<float>(1, 8, 8, 44, -1.0f, 1.0f);
    const NetGrads grads = backward(model, trace, grad_out);

    // Gradient cannot flow through zero fusion weights into the branches...
    for (const auto& l : grads.layers_t) {
        for (float v : l.weights) CHECK(v == 0.0f);
    }
    for (const auto& l : grads.layers_g) {
        for (float v : l.weights) CHECK(v == 0.0f);
    }
    // ...but it does reach the fusion branch: its last-layer bias gradient
    // is the spatial sum of grad_output.
    double mag = 0.0;
    for (float v : grads.layers_f.back().biases) mag += std::abs(v);
    CHECK(mag > 0.0);

    // With only the last fusion layer zeroed, that layer's weight gradients
    // are generally nonzero (its input activations are live) while the
    // branches still receive nothing.
    Model partial = build_network<float>(tiny_config());
    randomize_params(partial, 45);
    std::fill(partial.layers_f.back().weights.begin(), partial.layers_f.back().weights.end(),
              0.0f);
    std::fill(partial.layers_f.back().biases.begin(), partial.layers_f.back().biases.end(),
              0.0f);
    ForwardTrace trace2;
    (void)forward(partial, target, guidance, 1, &trace2);
    const NetGrads grads2 = backward(partial, trace2, grad_out);
    double wmag = 0.0;
    for (float v : grads2.layers_f.back().weights) wmag += std::abs(v);
    CHECK(wmag > 0.0);
    for (const auto& l : grads2.layers_t) {
        for (float v : l.weights) CHECK(v == 0.0f);
    }

    // A single-layer fusion branch is the merge layer itself, so zero
    // weights there still see the live concatenated input.
    NetworkConfig single = tiny_config();
    single.depth_f = 1;
    Model merge_only = build_network<float>(single);
    randomize_params(merge_only, 46);
    zero_subnet(merge_only.layers_f);
    ForwardTrace trace3;
    (void)forward(merge_only, target, guidance, 1, &trace3);
    const NetGrads grads3 = backward(merge_only, trace3, grad_out);
    double first_mag = 0.0;
    for (float v : grads3.layers_f.front().weights) first_mag += std::abs(v);
    CHECK(first_mag > 0.0);
}

TEST_CASE("backward requires a recorded trace") {
    Model model = build_network<float>(tiny_config());
    ForwardTrace empty;
    CHECK_THROWS_AS(backward(model, empty, Tensor(1, 4, 4)), ConfigError);
}

TEST_CASE("network gradients pass the finite-difference check (tiny config)") {
    NetworkConfig cfg = tiny_config();
    ModelD model = build_network<double>(cfg);
    randomize_params(model, 51);
    const TensorD target = random_tensor<double>(1, 7, 7, 52);
    const TensorD guidance = random_tensor<double>(1, 7, 7, 53);
    const TensorD gt = random_tensor<double>(1, 7, 7, 54);

    std::vector<double> params = flatten_params(model);
    auto loss = [&](const std::vector<double>& p) {
        ModelD m = model;
        unflatten_params(m, p);
        return mse_loss(forward(m, target, guidance), gt);
    };
    auto analytic = [&](const std::vector<double>& p) {
        ModelD m = model;
        unflatten_params(m, p);
        ForwardTraceT<double> trace;
        const TensorD out = forward(m, target, guidance, 1, &trace);
        return flatten_grads(backward(m, trace, mse_loss_grad(out, gt)));
    };
    CHECK(grad_check<double>(params, loss, analytic, 1e-3) <= 1e-6);
}

TEST_CASE("serialize/deserialize round-trips bitwise") {
    NetworkConfig cfg = tiny_config();
    cfg.seed = 77;
    Model model = build_network<float>(cfg);
    randomize_params(model, 78);
    const auto bytes = serialize(model);
    const Model back = deserialize(bytes);
    CHECK(serialize(back) == bytes);
    CHECK(model_param_count(back) == param_count(cfg));
}

TEST_CASE("checkpoint payload length matches param_count") {
    const Model model = build_network<float>(NetworkConfig{});
    const auto bytes = serialize(model);
    const std::string json = config_to_json(model.config).dump();
    CHECK(bytes.size() == 8 + json.size() + 64515 * 4);
}

TEST_CASE("deserialize rejects malformed streams") {
    Model model = build_network<float>(tiny_config());
    auto bytes = serialize(model);

    auto corrupted = bytes;
    corrupted[0] = 'X';
    CHECK_THROWS_WITH_AS(deserialize(corrupted), "checkpoint: bad magic", FormatError);

    auto wrong_version = bytes;
    wrong_version[3] = 0x02;
    CHECK_THROWS_AS(deserialize(wrong_version), FormatError);

    auto truncated = bytes;
    truncated.resize(truncated.size() - 5);
    CHECK_THROWS_AS(deserialize(truncated), FormatError);

    auto padded = bytes;
    padded.push_back(0);
    CHECK_THROWS_AS(deserialize(padded), FormatError);

    CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>{'D', 'J'}), FormatError);
}

TEST_CASE("a few ablation-grid rows build and run forward/backward") {
    const Tensor target = random_tensor<float>(1, 32, 32, 61);
    const Tensor guidance = random_tensor<float>(3, 32, 32, 62);
    auto run = [&](NetworkConfig cfg) {
        Model model = build_network<float>(cfg);
        ForwardTrace trace;
        const Tensor out = forward(model, target, guidance, 1, &trace);
        CHECK(out.same_shape(target));
        const NetGrads grads = backward(model, trace, random_tensor<float>(1, 32, 32, 63));
        CHECK(flatten_grads(grads).size() == param_count(cfg));
        CHECK(param_count(cfg) * 4 + 8 <= serialize(model).size());
    };
    NetworkConfig cfg;
    run(cfg);
    cfg = NetworkConfig{};
    cfg.n1 = 64;
    cfg.n2 = 32;
    run(cfg);
    cfg = NetworkConfig{};
    cfg.depth_t = cfg.depth_g = 0;
    cfg.depth_f = 6;
    run(cfg);
    cfg = NetworkConfig{};
    cfg.depth_t = cfg.depth_g = 4;
    cfg.depth_f = 2;
    run(cfg);
    cfg = NetworkConfig{};
    cfg.f1 = 11;
    cfg.f2 = 3;
    cfg.f3 = 7;
    run(cfg);
}
