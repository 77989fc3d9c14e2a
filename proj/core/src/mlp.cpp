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

#include "epi/mlp.hpp"

#include "epi/errors.hpp"
#include "epi/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace epi {

auto layer_sizes(const MLPConfig& config) -> std::vector<int>
{
    if (config.input_dim < 1 || config.hidden_layers < 0
        || config.output_dim < 1
        || (config.hidden_layers > 0 && config.hidden_width < 1)) {
        throw InvalidArgument("invalid MLP configuration");
    }
    std::vector<int> sizes;
    sizes.push_back(config.input_dim);
    for (int l = 0; l < config.hidden_layers; ++l) {
        sizes.push_back(config.hidden_width);
    }
    sizes.push_back(config.output_dim);
    return sizes;
}

auto param_count(const MLPConfig& config) -> int
{
    const auto sizes = layer_sizes(config);
    int count = 0;
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        count += (sizes[l - 1] + 1) * sizes[l];
    }
    return count;
}

namespace {

auto check_params(const MLPConfig& config, std::span<const double> params)
    -> void
{
    if (static_cast<int>(params.size()) != param_count(config)) {
        throw InvalidArgument("parameter vector has length "
                              + std::to_string(params.size()) + ", expected "
                              + std::to_string(param_count(config)));
    }
}

auto resize_workspace(MlpWorkspace& ws, const std::vector<int>& sizes) -> void
{
    ws.act.resize(sizes.size());
    ws.act_dot.resize(sizes.size());
    ws.bar_act.resize(sizes.size());
    ws.bar_act_dot.resize(sizes.size());
    for (std::size_t l = 0; l < sizes.size(); ++l) {
        const auto n = static_cast<std::size_t>(sizes[l]);
        ws.act[l].resize(n);
        ws.act_dot[l].resize(n);
        ws.bar_act[l].resize(n);
        ws.bar_act_dot[l].resize(n);
    }
}

} // namespace

auto eval(const MLPConfig& config,
          std::span<const double> params,
          double t,
          MlpWorkspace& ws) -> void
{
    check_params(config, params);
    const auto sizes = layer_sizes(config);
    resize_workspace(ws, sizes);
    // Time enters through input component 0; further input components
    // (unused in this artifact) would be constants with zero derivative.
    ws.act[0].assign(static_cast<std::size_t>(config.input_dim), 0.0);
    ws.act_dot[0].assign(static_cast<std::size_t>(config.input_dim), 0.0);
    ws.act[0][0] = t;
    ws.act_dot[0][0] = 1.0;
    const std::size_t layers = sizes.size() - 1;
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        const auto fan_in = static_cast<std::size_t>(sizes[l]);
        const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
        const auto* weights = params.data() + offset;
        const auto* biases = weights + fan_in * fan_out;
        const auto& a_prev = ws.act[l];
        const auto& adot_prev = ws.act_dot[l];
        auto& a = ws.act[l + 1];
        auto& adot = ws.act_dot[l + 1];
        const bool is_output = (l == layers - 1);
        for (std::size_t i = 0; i < fan_out; ++i) {
            double z = biases[i];
            double zdot = 0.0;
            const auto* row = weights + i * fan_in;
            for (std::size_t j = 0; j < fan_in; ++j) {
                z += row[j] * a_prev[j];
                zdot += row[j] * adot_prev[j];
            }
            if (is_output) {
                a[i] = z;
                adot[i] = zdot;
            } else {
                const double tz = std::tanh(z);
                a[i] = tz;
                adot[i] = (1.0 - tz * tz) * zdot;
            }
        }
        offset += (fan_in + 1) * fan_out;
    }
}

auto backprop(const MLPConfig& config,
              std::span<const double> params,
              MlpWorkspace& ws,
              std::span<const double> bar_out,
              std::span<const double> bar_dout,
              std::span<double> grad) -> void
{
    check_params(config, params);
    if (grad.size() != params.size()) {
        throw InvalidArgument("gradient buffer length mismatch");
    }
    const auto sizes = layer_sizes(config);
    if (static_cast<int>(bar_out.size()) != config.output_dim
        || static_cast<int>(bar_dout.size()) != config.output_dim) {
        throw InvalidArgument("cotangent length mismatch");
    }
    const std::size_t layers = sizes.size() - 1;
    std::vector<std::size_t> offsets(layers);
    {
        std::size_t offset = 0;
        for (std::size_t l = 0; l < layers; ++l) {
            offsets[l] = offset;
            offset += static_cast<std::size_t>((sizes[l] + 1) * sizes[l + 1]);
        }
    }
    for (std::size_t i = 0; i < bar_out.size(); ++i) {
        ws.bar_act.back()[i] = bar_out[i];
        ws.bar_act_dot.back()[i] = bar_dout[i];
    }
    for (std::size_t l = layers; l-- > 0;) {
        const auto fan_in = static_cast<std::size_t>(sizes[l]);
        const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
        const auto* weights = params.data() + offsets[l];
        auto* grad_weights = grad.data() + offsets[l];
        auto* grad_biases = grad_weights + fan_in * fan_out;
        const auto& a = ws.act[l + 1];
        const auto& adot = ws.act_dot[l + 1];
        const auto& a_prev = ws.act[l];
        const auto& adot_prev = ws.act_dot[l];
        auto& bar_a = ws.bar_act[l + 1];
        auto& bar_adot = ws.bar_act_dot[l + 1];
        auto& bar_prev = ws.bar_act[l];
        auto& bar_prev_dot = ws.bar_act_dot[l];
        std::fill(bar_prev.begin(), bar_prev.end(), 0.0);
        std::fill(bar_prev_dot.begin(), bar_prev_dot.end(), 0.0);
        const bool is_output = (l == layers - 1);
        for (std::size_t i = 0; i < fan_out; ++i) {
            // Pre-activation cotangents; for tanh units the value path
            // picks up (1 - a^2) and the derivative path couples back
            // into the value via -2 a adot.
            double bar_z = bar_a[i];
            double bar_zdot = bar_adot[i];
            if (!is_output) {
                const double sech2 = 1.0 - a[i] * a[i];
                bar_z = bar_a[i] * sech2 - bar_adot[i] * 2.0 * a[i] * adot[i];
                bar_zdot = bar_adot[i] * sech2;
            }
            const auto* row = weights + i * fan_in;
            auto* grad_row = grad_weights + i * fan_in;
            for (std::size_t j = 0; j < fan_in; ++j) {
                grad_row[j] += bar_z * a_prev[j] + bar_zdot * adot_prev[j];
                bar_prev[j] += row[j] * bar_z;
                bar_prev_dot[j] += row[j] * bar_zdot;
            }
            grad_biases[i] += bar_z;
        }
    }
}

auto forward(const MLPConfig& config, std::span<const double> params, double t)
    -> std::vector<double>
{
    MlpWorkspace ws;
    eval(config, params, t, ws);
    return ws.act.back();
}

auto forward_with_time_grad(const MLPConfig& config,
                            std::span<const double> params,
                            double t)
    -> std::pair<std::vector<double>, std::vector<double>>
{
    MlpWorkspace ws;
    eval(config, params, t, ws);
    return { ws.act.back(), ws.act_dot.back() };
}

auto grad_params(const MLPConfig& config,
                 std::span<const double> params,
                 double t,
                 std::span<const double> upstream) -> std::vector<double>
{
    MlpWorkspace ws;
    eval(config, params, t, ws);
    std::vector<double> grad(params.size(), 0.0);
    const std::vector<double> bar_dout(
        static_cast<std::size_t>(config.output_dim), 0.0);
    backprop(config, params, ws, upstream, bar_dout, grad);
    return grad;
}

auto init_params(const MLPConfig& config, std::uint64_t seed)
    -> std::vector<double>
{
    const auto sizes = layer_sizes(config);
    std::vector<double> params;
    params.reserve(static_cast<std::size_t>(param_count(config)));
    Rng rng(seed);
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        const double bound =
            std::sqrt(6.0 / static_cast<double>(sizes[l - 1] + sizes[l]));
        const auto layer_params =
            static_cast<std::size_t>((sizes[l - 1] + 1) * sizes[l]);
        for (std::size_t i = 0; i < layer_params; ++i) {
            params.push_back(rng.uniform(-bound, bound));
        }
    }
    return params;
}

auto write_checkpoint(const Checkpoint& checkpoint) -> std::string
{
    std::ostringstream out;
    out << "mlp-checkpoint v1\n"
        << "input_dim " << checkpoint.config.input_dim << '\n'
        << "hidden_layers " << checkpoint.config.hidden_layers << '\n'
        << "hidden_width " << checkpoint.config.hidden_width << '\n'
        << "output_dim " << checkpoint.config.output_dim << '\n'
        << "seed " << checkpoint.seed << '\n'
        << "step " << checkpoint.step << '\n'
        << "params " << checkpoint.params.size() << '\n';
    char buf[48];
    for (const double p : checkpoint.params) {
        std::snprintf(buf, sizeof(buf), "%a\n", p);
        out << buf;
    }
    return out.str();
}

auto parse_checkpoint(const std::string& text) -> Checkpoint
{
    std::istringstream in(text);
    std::string magic;
    std::string version;
    in >> magic >> version;
    if (magic != "mlp-checkpoint" || version != "v1") {
        throw ParseError("not a checkpoint file");
    }
    Checkpoint checkpoint;
    std::size_t count = 0;
    const auto read_field = [&](const char* name, auto& value) {
        std::string key;
        in >> key >> value;
        if (!in || key != name) {
            throw ParseError("checkpoint field '" + std::string(name)
                             + "' missing or out of order");
        }
    };
    read_field("input_dim", checkpoint.config.input_dim);
    read_field("hidden_layers", checkpoint.config.hidden_layers);
    read_field("hidden_width", checkpoint.config.hidden_width);
    read_field("output_dim", checkpoint.config.output_dim);
    read_field("seed", checkpoint.seed);
    read_field("step", checkpoint.step);
    read_field("params", count);
    if (static_cast<int>(count) != param_count(checkpoint.config)) {
        throw ParseError("checkpoint parameter count does not match config");
    }
    checkpoint.params.reserve(count);
    std::string token;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> token)) {
            throw ParseError("checkpoint truncated");
        }
        char* end = nullptr;
        const double value = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0') {
            throw ParseError("bad checkpoint value '" + token + "'");
        }
        checkpoint.params.push_back(value);
    }
    return checkpoint;
}

} // namespace epi
