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
#include <string>
#include <utility>
#include <vector>

namespace epi {

// Fully connected stack: input -> hidden_layers x hidden_width (tanh)
// -> output (affine, no activation).  hidden_layers may be 0 for the
// degenerate linear net used in tests.
struct MLPConfig
{
    int input_dim = 1;
    int hidden_layers = 3;
    int hidden_width = 50;
    int output_dim = 9;
};

// Neuron counts per layer boundary, input first.
auto layer_sizes(const MLPConfig& config) -> std::vector<int>;

// Flat parameter length: sum of (fan_in + 1) * fan_out over layers.
// Layout is layer-major, row-major weights first, then biases.
auto param_count(const MLPConfig& config) -> int;

// Holds per-layer activations and their time derivatives from the last
// eval() so the reverse pass can reuse them without allocating.
struct MlpWorkspace
{
    std::vector<std::vector<double>> act;
    std::vector<std::vector<double>> act_dot;
    std::vector<std::vector<double>> bar_act;
    std::vector<std::vector<double>> bar_act_dot;

    [[nodiscard]] auto output() const -> std::span<const double>
    {
        return act.back();
    }
    [[nodiscard]] auto output_dot() const -> std::span<const double>
    {
        return act_dot.back();
    }
};

// Forward pass propagating both values and d/dt of every activation.
auto eval(const MLPConfig& config,
          std::span<const double> params,
          double t,
          MlpWorkspace& ws) -> void;

// Reverse pass over the last eval(): accumulates into grad the parameter
// gradient of <bar_out, output> + <bar_dout, d output/dt>.
auto backprop(const MLPConfig& config,
              std::span<const double> params,
              MlpWorkspace& ws,
              std::span<const double> bar_out,
              std::span<const double> bar_dout,
              std::span<double> grad) -> void;

auto forward(const MLPConfig& config, std::span<const double> params, double t)
    -> std::vector<double>;

auto forward_with_time_grad(const MLPConfig& config,
                            std::span<const double> params,
                            double t)
    -> std::pair<std::vector<double>, std::vector<double>>;

// Gradient of <upstream, forward(t)> with respect to every parameter.
auto grad_params(const MLPConfig& config,
                 std::span<const double> params,
                 double t,
                 std::span<const double> upstream) -> std::vector<double>;

// Uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, biases included,
// deterministic in the seed.
auto init_params(const MLPConfig& config, std::uint64_t seed)
    -> std::vector<double>;

// Text checkpoint with config header, seed, step count, and hexfloat
// parameters; round-trips bit-exactly.
struct Checkpoint
{
    MLPConfig config;
    std::uint64_t seed = 0;
    long long step = 0;
    std::vector<double> params;
};

auto write_checkpoint(const Checkpoint& checkpoint) -> std::string;
auto parse_checkpoint(const std::string& text) -> Checkpoint;

} // namespace epi
