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

#ifndef DJF_CORE_APPLY_HPP
#define DJF_CORE_APPLY_HPP

#include <vector>

#include "core/net.hpp"
#include "core/tensor.hpp"

namespace djf {

/// Which guidance the self-guided iteration uses: the original image's luma
/// throughout, or the previous iteration's output (rolling).
enum class GuidanceMode { fixed, rolling };

/// Which sub-network a feature dump reads from.
enum class Subnet { target, guidance, fusion };

/// Runs the model on a target of any channel count: each target channel is
/// filtered independently and restacked. Single-channel guidance is
/// replicated to 3 channels when the model expects 3; other channel counts
/// are rejected. The model must process 1 target channel per pass.
Tensor joint_filter(const Model& model, const Tensor& target, const Tensor& guidance,
                    int threads = 1);

/// Bicubic-resizes the low-res target to guidance resolution, then applies
/// joint_filter. Guidance dims must be exactly low dims times scale.
Tensor upsample(const Model& model, const Tensor& low_target, const Tensor& guidance, int scale,
                int threads = 1);

/// One joint_filter pass over a full-resolution noisy target.
Tensor denoise(const Model& model, const Tensor& noisy, const Tensor& guidance, int threads = 1);

/// Self-guided structure-texture separation: iterates
///   x_k = joint_filter(model, x_{k-1}, guidance)
/// for `iterations` steps. In fixed mode the guidance stays the original
/// image's luma; in rolling mode it tracks the previous output.
Tensor texture_separate(const Model& model, const Tensor& image, int iterations,
                        GuidanceMode mode = GuidanceMode::fixed, int threads = 1);

/// Post-activation maps of one layer (1-based) of the chosen sub-network,
/// each min-max normalized to [0,1] (constant maps normalize to all zeros).
std::vector<Tensor> dump_features(const Model& model, const Tensor& target,
                                  const Tensor& guidance, Subnet which, int layer,
                                  int threads = 1);

}  // namespace djf

#endif  // DJF_CORE_APPLY_HPP
