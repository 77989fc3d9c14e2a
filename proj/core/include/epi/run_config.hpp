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
#include "epi/pinn.hpp"

#include <string>

namespace epi {

// Everything a run needs beyond the input files.  week1_end maps week
// indices to calendar dates in the forecast-hub export.
struct RunConfig
{
    BacktestConfig backtest;
    Date week1_end{ std::chrono::year{ 2020 }, std::chrono::month{ 2 },
                    std::chrono::day{ 1 } };
    std::string out_dir = "out";
};

// Line-oriented `key = value` file; unknown keys are errors.  Keys:
// epochs, learning_rate, l2_coefficient, seed, w_ode, equation_weights,
// data_weights, collocation_per_week, horizons, first_origin,
// last_origin, window_length, workers, week1_end_date, out_dir.
auto parse_run_config(const std::string& text) -> RunConfig;
auto write_run_config(const RunConfig& config) -> std::string;

} // namespace epi
