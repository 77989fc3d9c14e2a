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

#include "epi/adam.hpp"
#include "epi/compartment.hpp"
#include "epi/forecast_types.hpp"
#include "epi/mlp.hpp"
#include "epi/scoring.hpp"
#include "epi/series.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace epi {

struct LossWeights
{
    double w_ode = 0.1;
    std::array<double, compartment_count> equation{ 1, 1, 1, 1, 1, 1, 1, 1, 1 };
    std::array<double, channel_count> data{ 1, 1, 1, 1, 1 };
};

// Weeks [first_week, last_week] of the dataset used for fitting; the
// model time span is days 7 * (first_week - 1) .. 7 * last_week.
struct TrainingWindow
{
    int first_week = 1;
    int last_week = 1;
};

// The trainable model: a 1->9 state subnet over the compartments, a
// 1->3 factor subnet (mobility, vaccines, raw transmission rate), and
// two scalars squashed into (0,1) for the hospitalization and death
// probabilities.  Parameters live in one flat vector, state subnet
// first, factor subnet second, then the two scalars.
struct PinnModel
{
    MLPConfig state_config{ 1, 3, 50, compartment_count };
    MLPConfig factor_config{ 1, 3, 50, 3 };
    RateParams rates;
    std::array<double, compartment_count> compartment_scale{ 1, 1, 1, 1, 1,
                                                             1, 1, 1, 1 };
    double t0_days = 0.0;
    double span_days = 1.0;
    std::vector<double> params;

    [[nodiscard]] auto total_param_count() const -> int;
    [[nodiscard]] auto state_params() const -> std::span<const double>;
    [[nodiscard]] auto factor_params() const -> std::span<const double>;
    [[nodiscard]] auto p_h() const -> double;
    [[nodiscard]] auto p_d() const -> double;
    // Transmission rate at normalized time, softplus of factor output 2.
    [[nodiscard]] auto beta_at(double tau) const -> double;
    [[nodiscard]] auto tau(double t_days) const -> double
    {
        return (t_days - t0_days) / span_days;
    }
};

auto sigmoid(double x) -> double;
auto softplus(double x) -> double;

// Person-units per normalized unit for each compartment, anchored to the
// dataset's channel ranges: weekly flow scales for L, Y, Z, H, D, the
// cumulative channel totals for the counters, and the population for X.
auto derive_compartment_scaling(const Dataset& dataset,
                                const RateParams& rates)
    -> std::array<double, compartment_count>;

auto make_model(const Dataset& dataset,
                const TrainingWindow& window,
                std::uint64_t seed) -> PinnModel;

// Normalized five-channel read-out at model-day t: weekly counts as
// 7-day differences of the cumulative counters (reported cases, hospital
// admissions, reported deaths), mobility and vaccines straight from the
// factor subnet.
auto observables(const PinnModel& model,
                 const ScalingSpec& scaling,
                 double t_days) -> std::array<double, channel_count>;

// Uniformly spaced residual evaluation times (model-days) across the
// window span, endpoints included.
auto collocation_points(const TrainingWindow& window, int per_week = 5)
    -> std::vector<double>;

auto data_loss(const PinnModel& model,
               const Dataset& dataset,
               const TrainingWindow& window,
               const LossWeights& weights = {}) -> double;

auto initial_loss(const PinnModel& model,
                  const Dataset& dataset,
                  const TrainingWindow& window) -> double;

auto residual_loss(const PinnModel& model,
                   const std::vector<double>& collocation,
                   const LossWeights& weights = {}) -> double;

auto total_loss(const PinnModel& model,
                const Dataset& dataset,
                const TrainingWindow& window,
                const LossWeights& weights,
                const std::vector<double>& collocation) -> double;

// Loss value plus its gradient over the full flat parameter vector,
// including the residual path through the time derivatives.
auto total_loss_grad(const PinnModel& model,
                     const Dataset& dataset,
                     const TrainingWindow& window,
                     const LossWeights& weights,
                     const std::vector<double>& collocation,
                     std::span<double> grad) -> double;

struct TrainResult
{
    PinnModel model;
    std::vector<double> loss_history;
};

auto train(const Dataset& dataset,
           const TrainingWindow& window,
           const TrainConfig& config,
           const LossWeights& weights,
           std::uint64_t seed,
           int collocation_per_week = 5) -> TrainResult;

// Denormalized, zero-clamped weekly totals for the three targets at
// origin_week + h.
auto predict_point(const PinnModel& model,
                   const ScalingSpec& scaling,
                   int origin_week,
                   std::span<const int> horizons = default_horizons)
    -> std::vector<PointForecast>;

struct BacktestConfig
{
    TrainConfig train;
    LossWeights weights;
    int first_origin = 17;
    int last_origin = 89;
    // 0 trains on all weeks up to the origin; a positive value keeps
    // only the trailing window of that many weeks.
    int window_length = 0;
    int collocation_per_week = 5;
    int workers = 1;
    std::vector<int> horizons{ 1, 2, 3, 4 };
};

struct WindowRecord
{
    int origin_week = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    int attempts = 0;
};

struct BacktestResult
{
    std::vector<PointForecast> forecasts;
    std::vector<WindowRecord> windows;
};

// One model per origin week, trained from scratch on weeks
// [max(1, origin - window_length + 1), origin]; a window whose loss
// diverges is retried once with a fresh derived seed, then skipped.
// Results are deterministic for any worker count.
auto rolling_backtest(const Dataset& dataset, const BacktestConfig& config)
    -> BacktestResult;

// Scores the trailing-window variants; each report's method is
// "len<L>".
auto window_length_study(const Dataset& dataset,
                         const std::vector<int>& lengths,
                         const BacktestConfig& config)
    -> std::vector<std::pair<int, ScoreReport>>;

// Backtest CSV: origin_week,target,horizon,value,seed,converged; failed
// windows keep their rows with converged = 0 and value 0.
auto write_backtest_csv(const BacktestResult& result) -> std::string;
auto read_backtest_csv(const std::string& text) -> BacktestResult;

} // namespace epi
