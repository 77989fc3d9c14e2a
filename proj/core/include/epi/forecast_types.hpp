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

#include "epi/series.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace epi {

// The three channels that receive forecasts; mobility and vaccines are
// covariates only.
inline constexpr std::array<Channel, 3> forecast_targets{
    Channel::cases,
    Channel::deaths,
    Channel::hosp,
};

inline constexpr std::array<int, 4> default_horizons{ 1, 2, 3, 4 };

// Denormalized weekly total forecast for origin_week + horizon.
struct PointForecast
{
    Channel target = Channel::cases;
    int horizon = 1;
    int origin_week = 0;
    double value = 0.0;

    [[nodiscard]] auto target_week() const -> int
    {
        return origin_week + horizon;
    }
};

// The COVID-19 Forecast Hub probability levels.
inline constexpr std::array<double, 23> quantile_levels{
    0.010, 0.025, 0.050, 0.100, 0.150, 0.200, 0.250, 0.300,
    0.350, 0.400, 0.450, 0.500, 0.550, 0.600, 0.650, 0.700,
    0.750, 0.800, 0.850, 0.900, 0.950, 0.975, 0.990,
};

inline constexpr int quantile_level_count = 23;

struct QuantileForecast
{
    Channel target = Channel::cases;
    int horizon = 1;
    int origin_week = 0;
    double mu = 0.0;
    double sigma = 0.0;
    std::array<double, quantile_level_count> values{};

    [[nodiscard]] auto target_week() const -> int
    {
        return origin_week + horizon;
    }
};

} // namespace epi
