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

#ifndef DJF_CORE_CHECKPOINT_HPP
#define DJF_CORE_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/net.hpp"

namespace djf {

/// Checkpoint stream layout:
///   "DJF"  0x01  uint32-LE json-length  <config JSON, UTF-8>
///   <all parameters as little-endian float32>
/// Parameter order follows flatten_params: sub-network (target, guidance,
/// fusion), layers front to back, weights (out, in, row, col) then biases.
std::vector<std::uint8_t> serialize(const Model& model);
Model deserialize(const std::vector<std::uint8_t>& bytes);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

nlohmann::json config_to_json(const NetworkConfig& cfg);

/// Builds a config from JSON. Absent keys keep their value from `base`,
/// so a partial object acts as an override set; unknown keys are rejected.
NetworkConfig config_from_json(const nlohmann::json& j, const NetworkConfig& base = {});

}  // namespace djf

#endif  // DJF_CORE_CHECKPOINT_HPP
