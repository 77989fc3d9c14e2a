// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include "epi/adam.hpp"

#include "epi/errors.hpp"

#include <cmath>

namespace epi {

auto adam_step(std::span<double> params,
               std::span<const double> grads,
               AdamState& state,
               const TrainConfig& config) -> void
{
    if (params.size() != grads.size() || params.size() != state.m.size()
        || params.size() != state.v.size()) {
        throw InvalidArgument("adam_step: shape mismatch");
    }
    ++state.step;
    const double bias1 =
        1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bias2 =
        1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + config.l2_coefficient * params[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / bias1;
        const double v_hat = state.v[i] / bias2;
        params[i] -= config.learning_rate * m_hat
                     / (std::sqrt(v_hat) + state.eps);
    }
}

auto l2_penalty(std::span<const double> params, double coefficient) -> double
{
    if (coefficient < 0) {
        throw InvalidArgument("l2_penalty: coefficient must be >= 0");
    }
    double sum = 0.0;
    for (const double p : params) {
        sum += p * p;
    }
    return coefficient * sum;
}

} // namespace epi
