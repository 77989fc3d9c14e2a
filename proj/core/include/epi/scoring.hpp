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

#include "epi/forecast_types.hpp"

#include <string>
#include <vector>

namespace epi {

auto mae(const std::vector<double>& predictions,
         const std::vector<double>& observations) -> double;

// Horizon-matched naive forecast: the last `horizon` observed weeks,
// shifted forward.  Element h-1 predicts origin_week + h from the value
// observed at origin_week + h - horizon.
auto naive_forecast(const WeeklySeries& series, int origin_week, int horizon)
    -> std::vector<double>;

auto mase(const std::vector<double>& model_predictions,
          const std::vector<double>& observations,
          const std::vector<double>& naive_predictions) -> double;

// Central (1 - alpha) interval penalty: width plus 2/alpha times the
// distance by which the observation escapes the interval.
auto interval_score(double lower, double upper, double alpha, double y)
    -> double;

// The 11 central-interval alphas paired with the 23 quantile levels.
inline constexpr std::array<double, 11> wis_alphas{
    0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
};

auto wis(const QuantileForecast& forecast, double y) -> double;

auto scaled_wis(double model_wis, double naive_wis) -> double;

struct ScoreCell
{
    std::string method;
    Channel target = Channel::cases;
    int horizon = 1;
    double mase = 0.0;
    double wis = 0.0;
    double scaled_wis = 0.0;
    int n_evaluated = 0;
};

struct ScoreReport
{
    std::vector<ScoreCell> cells;

    [[nodiscard]] auto find(const std::string& method,
                            Channel target,
                            int horizon) const -> const ScoreCell*;
};

// Aggregates model quantile forecasts against dataset truth per
// (target, horizon), building the naive baseline (point and quantile)
// internally from the same truth series.  A week is scored only where
// truth, the model forecast, and the naive forecast all exist.
auto build_report(const std::vector<QuantileForecast>& model_forecasts,
                  const Dataset& dataset,
                  const std::string& method = "pinn") -> ScoreReport;

auto write_report_csv(const ScoreReport& report) -> std::string;
auto read_report_csv(const std::string& text) -> ScoreReport;
auto format_report_table(const ScoreReport& report) -> std::string;

} // namespace epi
