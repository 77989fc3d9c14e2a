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

#include "epi/compartment.hpp"
#include "epi/series.hpp"

#include <cstdint>

namespace epi {

struct SyntheticOptions
{
    int weeks = 60;
    double dt = 0.01;
    // Multiplicative observation noise: value * (1 + noise * N(0,1)),
    // applied to every channel when noise > 0.
    double noise = 0.0;
    std::uint64_t noise_seed = 0;
};

// Integrates the scenario and emits the normalized weekly dataset the
// training pipeline expects: counts from 7-day counter differences,
// mobility as the weekly mean transmission level, vaccines as a smooth
// cumulative ramp.
auto synthetic_dataset(const Scenario& scenario,
                       const SyntheticOptions& options) -> Dataset;

// The calibrated two-wave epidemic used by the synthetic benchmarks.
auto default_synthetic_scenario() -> Scenario;

} // namespace epi
