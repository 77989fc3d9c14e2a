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

#include "epi/dates.hpp"
#include "epi/forecast_types.hpp"

#include <string>
#include <vector>

namespace epi {

// Signed forecast errors (forecast - observed) grouped per target and
// horizon; only errors already observable at the current origin belong
// here (the backtest driver enforces causality when appending).
class ErrorHistory
{
public:
    auto add(Channel target, int horizon, double error) -> void;
    [[nodiscard]] auto errors(Channel target, int horizon) const
        -> const std::vector<double>&;

private:
    static auto slot(Channel target, int horizon) -> std::size_t;
    std::array<std::vector<double>, 12> by_cell;
};

// Dispersion for a (target, horizon) cell: population standard deviation
// of its stored errors.  With one error: its magnitude; with none: 10%
// of the current point forecast.
auto estimate_sigma(const ErrorHistory& history,
                    Channel target,
                    int horizon,
                    double point_forecast) -> double;

// z with Phi(z) = p, accurate to ~1e-12 over [1e-6, 1 - 1e-6].
auto inverse_normal_cdf(double p) -> double;

// mu + sigma * z_p; sigma = 0 collapses to mu at every level.
auto gaussian_quantile(double mu, double sigma, double p) -> double;

// Gaussian read-out at the 23 levels, clamped at 0 (targets are counts).
auto build_quantile_forecast(const PointForecast& point, double sigma)
    -> QuantileForecast;

// Runs the causal quantile construction over a backtest's point
// forecasts: origins in ascending order, each sigma estimated from
// errors of forecasts whose target week has already been observed.
// Truth comes from the dataset in denormalized units.
auto build_quantile_series(const std::vector<PointForecast>& forecasts,
                           const Dataset& dataset)
    -> std::vector<QuantileForecast>;

// Forecast-hub row shape: forecast_date,target,target_end_date,type,
// quantile,value with one point row and 23 quantile rows per forecast.
// week1_end anchors week index 1 to a calendar Saturday.
auto write_hub_csv(const std::vector<QuantileForecast>& forecasts,
                   Date week1_end) -> std::string;
auto read_hub_csv(const std::string& text, Date week1_end)
    -> std::vector<QuantileForecast>;

} // namespace epi
