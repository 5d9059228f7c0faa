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

#include "core/net.hpp"

#include <string>

namespace djf {

namespace {

void require_positive(int v, const char* name) {
    if (v < 1) throw ConfigError(std::string("config: ") + name + " must be >= 1");
}

void require_odd(int v, const char* name) {
    if (v % 2 == 0) {
        throw ConfigError(std::string("config: ") + name + " must be odd for symmetric padding");
    }
}

// Shared head/middle/tail plan. Depth 2 drops the middle layers entirely;
// depth >= 4 repeats the n2-channel middle layer.
std::vector<LayerShape> subnet_plan(const NetworkConfig& cfg, int in_channels, int out_channels,
                                    int depth) {
    std::vector<LayerShape> plan;
    if (depth == 0) return plan;
    if (depth == 1) {
        plan.push_back({in_channels, out_channels, cfg.f1});
        return plan;
    }
    plan.push_back({in_channels, cfg.n1, cfg.f1});
    int prev = cfg.n1;
    for (int i = 0; i < depth - 2; ++i) {
        plan.push_back({prev, cfg.n2, cfg.f2});
        prev = cfg.n2;
    }
    plan.push_back({prev, out_channels, cfg.f3});
    return plan;
}

}  // namespace

void validate(const NetworkConfig& cfg) {
    require_positive(cfg.n1, "n1");
    require_positive(cfg.n2, "n2");
    require_positive(cfg.n3, "n3");
    require_positive(cfg.f1, "f1");
    require_positive(cfg.f2, "f2");
    require_positive(cfg.f3, "f3");
    require_positive(cfg.target_channels, "target_channels");
    require_positive(cfg.guidance_channels, "guidance_channels");
    require_odd(cfg.f1, "f1");
    require_odd(cfg.f2, "f2");
    require_odd(cfg.f3, "f3");
    if (cfg.depth_t != cfg.depth_g) {
        throw ConfigError("config: depth_t and depth_g must be equal (branches merge by "
                          "concatenation at their final layer)");
    }
    if (cfg.depth_t < 0) throw ConfigError("config: branch depth must be >= 0");
    if (cfg.depth_f < 1) throw ConfigError("config: depth_f must be >= 1");
}

std::vector<LayerShape> branch_plan(const NetworkConfig& cfg, int input_channels) {
    return subnet_plan(cfg, input_channels, cfg.n3, cfg.depth_t);
}

std::vector<LayerShape> fusion_plan(const NetworkConfig& cfg) {
    const int in = cfg.depth_t == 0 ? cfg.target_channels + cfg.guidance_channels : 2 * cfg.n3;
    return subnet_plan(cfg, in, cfg.target_channels, cfg.depth_f);
}

std::size_t param_count(const NetworkConfig& cfg) {
    validate(cfg);
    std::size_t n = 0;
    auto add = [&n](const std::vector<LayerShape>& plan) {
        for (const LayerShape& l : plan) {
            n += static_cast<std::size_t>(l.out_channels) *
                     static_cast<std::size_t>(l.in_channels) *
                     static_cast<std::size_t>(l.kernel) * static_cast<std::size_t>(l.kernel) +
                 static_cast<std::size_t>(l.out_channels);
        }
    };
    add(branch_plan(cfg, cfg.target_channels));
    add(branch_plan(cfg, cfg.guidance_channels));
    add(fusion_plan(cfg));
    return n;
}

}  // namespace djf
