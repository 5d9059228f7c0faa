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

#ifndef DJF_CORE_FILTERS_HPP
#define DJF_CORE_FILTERS_HPP

#include <cstddef>

#include "core/tensor.hpp"

namespace djf {

/// Joint bilateral upsampling parameters. sigma_spatial is in low-resolution
/// pixels, sigma_range in [0,1] intensity units, window_radius in low-res
/// pixels around the output's footprint.
struct JBUParams {
    double sigma_spatial = 1.0;
    double sigma_range = 0.1;
    int window_radius = 2;
};

/// Guided filter parameters: box window radius and the regularizer added to
/// the guidance variance.
struct GFParams {
    int radius = 1;
    double epsilon = 1e-4;
};

/// Decimation keeping the top-left sample of each scale x scale block:
/// out(i, j) = in(i*scale, j*scale). Dims must be divisible by scale.
Tensor nearest_downsample(const Tensor& img, int scale);

/// Separable Keys cubic resize (a = -0.5), edge-clamped sampling, source
/// coordinates mapped as src = (dst + 0.5) / scale - 0.5.
Tensor bicubic_resize(const Tensor& img, std::size_t out_h, std::size_t out_w);

/// Joint bilateral upsampling of `low` to the guidance resolution. Guidance
/// dims must be the same integer multiple of the low-res dims on both axes.
/// Weights combine a spatial Gaussian in low-res coordinates with a range
/// Gaussian over the per-channel Euclidean guidance difference; windows are
/// edge-clamped.
Tensor joint_bilateral_upsample(const Tensor& low, const Tensor& guidance, const JBUParams& p);

/// Guided filter over single-channel target/guidance of equal dims:
/// per-window linear model a = cov(G,T)/(var(G)+eps), b = mean(T) - a mean(G),
/// output = box(a)*G + box(b) with replicate-border box means.
Tensor guided_filter(const Tensor& target, const Tensor& guidance, const GFParams& p);

/// Replicate-border box mean over a (2r+1)^2 window, per channel.
Tensor box_mean(const Tensor& img, int radius);

/// Rec.601 luma of a 3-channel image; 1-channel input is returned unchanged.
Tensor luminance(const Tensor& img);

}  // namespace djf

#endif  // DJF_CORE_FILTERS_HPP
