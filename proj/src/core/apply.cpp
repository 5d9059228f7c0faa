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

#include "core/apply.hpp"

#include <algorithm>
#include <string>

#include "core/error.hpp"
#include "core/filters.hpp"

namespace djf {

namespace {

Tensor replicate_channels(const Tensor& single, std::size_t count) {
    Tensor out(count, single.height(), single.width());
    for (std::size_t c = 0; c < count; ++c) {
        std::copy(single.data(), single.data() + single.pixels(), out.channel(c));
    }
    return out;
}

// Brings the guidance to the channel count the model was trained with.
Tensor adapt_guidance(const Model& model, const Tensor& guidance) {
    const std::size_t want = static_cast<std::size_t>(model.config.guidance_channels);
    if (guidance.channels() != 1 && guidance.channels() != 3) {
        throw ShapeError("joint_filter: guidance must have 1 or 3 channels, got " +
                         guidance.shape_str());
    }
    if (guidance.channels() == want) return guidance;
    if (guidance.channels() == 1) return replicate_channels(guidance, want);
    throw ShapeError("joint_filter: model expects " + std::to_string(want) +
                     "-channel guidance, got " + guidance.shape_str());
}

}  // namespace

Tensor joint_filter(const Model& model, const Tensor& target, const Tensor& guidance,
                    int threads) {
    if (model.config.target_channels != 1) {
        throw ConfigError("joint_filter: model must process one target channel per pass");
    }
    if (target.height() != guidance.height() || target.width() != guidance.width()) {
        throw ShapeError("joint_filter: target " + target.shape_str() + " and guidance " +
                         guidance.shape_str() + " differ spatially");
    }
    const Tensor g = adapt_guidance(model, guidance);
    Tensor out(target.channels(), target.height(), target.width());
    for (std::size_t c = 0; c < target.channels(); ++c) {
        const Tensor filtered = forward(model, extract_channel(target, c), g, threads);
        std::copy(filtered.data(), filtered.data() + filtered.pixels(), out.channel(c));
    }
    return out;
}

Tensor upsample(const Model& model, const Tensor& low_target, const Tensor& guidance, int scale,
                int threads) {
    if (scale < 1) throw ConfigError("upsample: scale must be >= 1");
    if (guidance.height() != low_target.height() * static_cast<std::size_t>(scale) ||
        guidance.width() != low_target.width() * static_cast<std::size_t>(scale)) {
        throw ShapeError("upsample: guidance " + guidance.shape_str() + " is not " +
                         std::to_string(scale) + "x the target " + low_target.shape_str());
    }
    const Tensor full = bicubic_resize(low_target, guidance.height(), guidance.width());
    return joint_filter(model, full, guidance, threads);
}

Tensor denoise(const Model& model, const Tensor& noisy, const Tensor& guidance, int threads) {
    if (noisy.height() != guidance.height() || noisy.width() != guidance.width()) {
        throw ShapeError("denoise: target " + noisy.shape_str() + " and guidance " +
                         guidance.shape_str() + " differ spatially");
    }
    return joint_filter(model, noisy, guidance, threads);
}

Tensor texture_separate(const Model& model, const Tensor& image, int iterations,
                        GuidanceMode mode, int threads) {
    if (iterations < 0) throw ConfigError("texture_separate: iterations must be >= 0");
    Tensor x = image;
    Tensor fixed_guidance = luminance(image);
    for (int i = 0; i < iterations; ++i) {
        const Tensor& guide = mode == GuidanceMode::fixed ? fixed_guidance : x;
        const Tensor guide_luma = mode == GuidanceMode::fixed ? guide : luminance(guide);
        x = joint_filter(model, x, guide_luma, threads);
    }
    return x;
}

std::vector<Tensor> dump_features(const Model& model, const Tensor& target,
                                  const Tensor& guidance, Subnet which, int layer,
                                  int threads) {
    const Tensor g = adapt_guidance(model, guidance);
    ForwardTrace trace;
    (void)forward(model, target, g, threads, &trace);

    const SubnetTraceT<float>* subnet = nullptr;
    switch (which) {
        case Subnet::target: subnet = &trace.target; break;
        case Subnet::guidance: subnet = &trace.guidance; break;
        case Subnet::fusion: subnet = &trace.fusion; break;
    }
    if (layer < 1 || static_cast<std::size_t>(layer) > subnet->post.size()) {
        throw ConfigError("dump_features: layer " + std::to_string(layer) +
                          " out of range (sub-network has " +
                          std::to_string(subnet->post.size()) + " layers)");
    }
    const Tensor& maps = subnet->post[static_cast<std::size_t>(layer) - 1];

    std::vector<Tensor> out;
    out.reserve(maps.channels());
    for (std::size_t c = 0; c < maps.channels(); ++c) {
        Tensor m = extract_channel(maps, c);
        const auto [lo_it, hi_it] = std::minmax_element(m.data(), m.data() + m.size());
        const float lo = *lo_it;
        const float hi = *hi_it;
        if (hi > lo) {
            const float inv = 1.0f / (hi - lo);
            for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = (m.data()[i] - lo) * inv;
        } else {
            std::fill(m.data(), m.data() + m.size(), 0.0f);
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace djf
