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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace epi {

struct TrainConfig
{
    double learning_rate = 1e-3;
    long long epochs = 50'000;
    double l2_coefficient = 1e-5;
    std::uint64_t seed = 0;
};

struct AdamState
{
    std::vector<double> m;
    std::vector<double> v;
    long long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

// Bias-corrected Adam update, in place.  The L2 term enters as
// l2_coefficient * param added to the raw gradient before the moment
// updates (coupled decay, not AdamW).
auto adam_step(std::span<double> params,
               std::span<const double> grads,
               AdamState& state,
               const TrainConfig& config) -> void;

// coefficient * sum of squared parameters.
auto l2_penalty(std::span<const double> params, double coefficient) -> double;

} // namespace epi
