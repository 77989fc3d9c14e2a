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

#include "epi/compartment.hpp"
#include "epi/mlp.hpp"
#include "epi/pinn.hpp"
#include "epi/quantiles.hpp"
#include "epi/scoring.hpp"
#include "epi/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

namespace {

const epi::MLPConfig net_config{ 1, 3, 50, 9 };

void bm_mlp_eval(benchmark::State& state)
{
    const auto params = epi::init_params(net_config, 7);
    epi::MlpWorkspace workspace;
    double t = 0.0;
    for (auto _ : state) {
        t += 1e-6;
        epi::eval(net_config, params, t, workspace);
        benchmark::DoNotOptimize(workspace.output().data());
    }
}
BENCHMARK(bm_mlp_eval);

void bm_mlp_backprop(benchmark::State& state)
{
    const auto params = epi::init_params(net_config, 7);
    epi::MlpWorkspace workspace;
    epi::eval(net_config, params, 0.37, workspace);
    const std::vector<double> bar_out(9, 1.0);
    const std::vector<double> bar_dout(9, 0.5);
    std::vector<double> grad(params.size());
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        epi::backprop(net_config, params, workspace, bar_out, bar_dout, grad);
        benchmark::DoNotOptimize(grad.data());
    }
}
BENCHMARK(bm_mlp_backprop);

void bm_rk4_year(benchmark::State& state)
{
    const auto scenario = epi::default_synthetic_scenario();
    const auto beta = [&](double t) { return scenario.beta(t); };
    for (auto _ : state) {
        const auto path = epi::integrate_rk4(scenario.initial, beta,
                                             scenario.params, 0.0, 365.0,
                                             0.05);
        benchmark::DoNotOptimize(path.data());
    }
}
BENCHMARK(bm_rk4_year);

void bm_wis(benchmark::State& state)
{
    epi::QuantileForecast forecast;
    forecast.mu = 1000.0;
    forecast.sigma = 120.0;
    for (std::size_t i = 0; i < epi::quantile_levels.size(); ++i) {
        forecast.values[i] = epi::gaussian_quantile(forecast.mu,
                                                    forecast.sigma,
                                                    epi::quantile_levels[i]);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(epi::wis(forecast, 1234.0));
    }
}
BENCHMARK(bm_wis);

void bm_train_epochs(benchmark::State& state)
{
    const auto dataset =
        epi::synthetic_dataset(epi::default_synthetic_scenario(), {});
    const epi::TrainingWindow window{ 1, 20 };
    epi::TrainConfig config;
    config.epochs = state.range(0);
    for (auto _ : state) {
        const auto result = epi::train(dataset, window, config,
                                       epi::LossWeights{}, 11);
        benchmark::DoNotOptimize(result.model.params.data());
    }
}
BENCHMARK(bm_train_epochs)->Arg(50)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
