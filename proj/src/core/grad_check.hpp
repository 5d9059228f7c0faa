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

#ifndef DJF_CORE_GRAD_CHECK_HPP
#define DJF_CORE_GRAD_CHECK_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace djf {

/// Compares an analytic gradient against central finite differences.
///
/// `loss` evaluates the scalar objective at a parameter vector; `analytic`
/// returns its gradient at the same point. `indices` selects which parameters
/// to probe (all of them when empty). Returns the worst relative error
///   |analytic - numeric| / max(1e-12, |analytic| + |numeric|)
/// over the probed parameters. The parameter vector is restored on return.
template <class S>
S grad_check(std::vector<S>& params, const std::function<S(const std::vector<S>&)>& loss,
             const std::function<std::vector<S>(const std::vector<S>&)>& analytic, S epsilon,
             const std::vector<std::size_t>& indices = {}) {
    if (!(epsilon > S(0))) throw ConfigError("grad_check: epsilon must be positive");
    const std::vector<S> grad = analytic(params);
    if (grad.size() != params.size()) {
        throw ConfigError("grad_check: analytic gradient length " + std::to_string(grad.size()) +
                          " does not match parameter count " + std::to_string(params.size()));
    }
    std::vector<std::size_t> all;
    const std::vector<std::size_t>* probe = &indices;
    if (indices.empty()) {
        all.resize(params.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        probe = &all;
    }
    S worst = S(0);
    for (std::size_t i : *probe) {
        if (i >= params.size()) throw ConfigError("grad_check: parameter index out of range");
        const S saved = params[i];
        params[i] = saved + epsilon;
        const S f_plus = loss(params);
        params[i] = saved - epsilon;
        const S f_minus = loss(params);
        params[i] = saved;
        if (!std::isfinite(static_cast<double>(f_plus)) ||
            !std::isfinite(static_cast<double>(f_minus))) {
            throw NumericError("grad_check: non-finite loss at parameter " + std::to_string(i));
        }
        const S numeric = (f_plus - f_minus) / (S(2) * epsilon);
        const S denom = std::max(S(1e-12), std::abs(grad[i]) + std::abs(numeric));
        const S err = std::abs(grad[i] - numeric) / denom;
        if (err > worst) worst = err;
    }
    return worst;
}

}  // namespace djf

#endif  // DJF_CORE_GRAD_CHECK_HPP
