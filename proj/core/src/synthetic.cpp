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

#include "epi/synthetic.hpp"

#include "epi/data_pipeline.hpp"
#include "epi/errors.hpp"
#include "epi/rng.hpp"

#include <algorithm>
#include <cmath>

namespace epi {

namespace {

// Nearest trajectory sample; the integrator's index-based step times
// keep this within round-off of the requested time.
auto state_at(const std::vector<TrajectoryPoint>& trajectory,
              double t,
              double dt) -> const CompartmentState&
{
    const auto index = static_cast<std::size_t>(
        std::llround((t - trajectory.front().t) / dt));
    if (index >= trajectory.size()
        || std::abs(trajectory[index].t - t) > dt / 4) {
        throw InvalidArgument("trajectory does not cover requested time");
    }
    return trajectory[index].state;
}

// Smooth cumulative vaccination ramp covering the scenario span.
auto vaccine_ramp(double t, double t_total, double population) -> double
{
    const double t_mid = 0.6 * t_total;
    const double width = 25.0;
    return 0.6 * population / (1.0 + std::exp(-(t - t_mid) / width));
}

} // namespace

auto synthetic_dataset(const Scenario& scenario,
                       const SyntheticOptions& options) -> Dataset
{
    if (options.weeks < 5) {
        throw InvalidArgument("synthetic_dataset: need at least 5 weeks");
    }
    if (!(options.dt > 0.0) || options.noise < 0.0) {
        throw InvalidArgument("synthetic_dataset: bad dt or noise");
    }
    const double t_total = 7.0 * options.weeks;
    const auto beta_fn = [&](double t) { return scenario.beta(t); };
    const auto trajectory = integrate_rk4(scenario.initial, beta_fn,
                                          scenario.params, 0.0, t_total,
                                          options.dt);
    Dataset dataset;
    for (auto& series : dataset.channels) {
        series.first_week = 1;
        series.values.reserve(static_cast<std::size_t>(options.weeks));
    }
    for (int week = 1; week <= options.weeks; ++week) {
        const auto& now = state_at(trajectory, 7.0 * week, options.dt);
        const auto& prev = state_at(trajectory, 7.0 * (week - 1), options.dt);
        dataset.channel(Channel::cases).values.push_back(now[4] - prev[4]);
        dataset.channel(Channel::deaths).values.push_back(now[8] - prev[8]);
        dataset.channel(Channel::hosp).values.push_back(now[6] - prev[6]);
        double beta_mean = 0.0;
        double vaccine_mean = 0.0;
        for (int day = 0; day < 7; ++day) {
            const double t = 7.0 * (week - 1) + day + 0.5;
            beta_mean += scenario.beta(t);
            vaccine_mean +=
                vaccine_ramp(t, t_total, scenario.params.population);
        }
        dataset.channel(Channel::mobility).values.push_back(beta_mean / 7.0);
        dataset.channel(Channel::vaccines)
            .values.push_back(vaccine_mean / 7.0);
    }
    if (options.noise > 0.0) {
        Rng rng(options.noise_seed);
        for (const auto channel : all_channels) {
            for (auto& value : dataset.channel(channel).values) {
                value *= 1.0 + options.noise * rng.normal();
                if (is_count_channel(channel)) {
                    value = std::max(0.0, value);
                }
            }
        }
    }
    return normalize(dataset).first;
}

auto default_synthetic_scenario() -> Scenario
{
    Scenario scenario;
    scenario.params.p_h = 0.025;
    scenario.params.p_d = 0.25;
    const double y0 = 30'000.0;
    const double l0 = 40'000.0;
    const auto& p = scenario.params;
    scenario.initial[0] = p.population - l0 - y0; // X
    scenario.initial[1] = l0;                     // L
    scenario.initial[2] = y0;                     // Y
    scenario.initial[3] = p.rho * p.gamma * y0 / p.gamma_z;   // Z
    scenario.initial[5] = p.p_h * p.gamma * y0 / p.gamma_h;   // H
    scenario.initial[7] =
        p.p_d * p.gamma_h * scenario.initial[5] / p.gamma_d;  // D
    scenario.beta.knot_times = { 0, 49, 91, 154, 203, 252, 287, 350, 420 };
    scenario.beta.knot_values = { 0.30, 0.32, 0.16, 0.16, 0.42,
                                  0.45, 0.18, 0.14, 0.14 };
    return scenario;
}

} // namespace epi
