#include "epi/pinn.hpp"

#include "epi/errors.hpp"
#include "epi/mlp.hpp"
#include "epi/rng.hpp"
#include "epi/series.hpp"

#include "doctest.h"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

using namespace epi;

namespace {

// Smooth normalized epidemic-shaped curves; every channel varies week to
// week so lagged naive differences never vanish.
auto train_dataset(int weeks) -> Dataset
{
    Dataset dataset;
    for (int w = 1; w <= weeks; ++w) {
        const auto t = static_cast<double>(w);
        dataset.channel(Channel::cases)
            .values.push_back(0.5 + 0.35 * std::sin(0.5 * t));
        dataset.channel(Channel::deaths)
            .values.push_back(0.45 + 0.3 * std::sin(0.5 * t - 0.9));
        dataset.channel(Channel::hosp)
            .values.push_back(0.5 + 0.32 * std::sin(0.5 * t - 0.45));
        dataset.channel(Channel::mobility)
            .values.push_back(0.45 - 0.25 * std::sin(0.55 * t));
        dataset.channel(Channel::vaccines)
            .values.push_back(t / (weeks + 2.0));
    }
    for (auto channel : all_channels) {
        dataset.channel(channel).first_week = 1;
    }
    return dataset;
}

auto param_norm(const std::vector<double>& params) -> double
{
    double sum = 0.0;
    for (const double p : params) {
        sum += p * p;
    }
    return std::sqrt(sum);
}

// Linear nets whose counter slopes give constant weekly totals, so the
// denormalization and clamping in predict_point are exactly checkable.
auto constant_rate_model() -> PinnModel
{
    PinnModel model;
    model.state_config = MLPConfig{ 1, 0, 1, compartment_count };
    model.factor_config = MLPConfig{ 1, 0, 1, 3 };
    model.t0_days = 0.0;
    model.span_days = 28.0;
    model.params.assign(static_cast<std::size_t>(param_count(model.state_config)
                                                 + param_count(model.factor_config))
                            + 2,
                        0.0);
    model.params[4] = -40.0; // reported-case counter slope
    model.params[6] = 4.0;   // admissions counter slope
    model.params[8] = 2.0;   // reported-death counter slope
    return model;
}

} // namespace

TEST_CASE("train is deterministic in the seed")
{
    const auto dataset = train_dataset(8);
    const TrainingWindow window{ 1, 8 };
    TrainConfig config;
    config.epochs = 50;
    const LossWeights weights;

    const auto first = train(dataset, window, config, weights, 5, 2);
    const auto second = train(dataset, window, config, weights, 5, 2);
    CHECK(first.model.params == second.model.params);
    CHECK(first.loss_history == second.loss_history);

    const auto other = train(dataset, window, config, weights, 6, 2);
    CHECK(first.model.params != other.model.params);
}

TEST_CASE("train lowers the loss and records every epoch")
{
    const auto dataset = train_dataset(8);
    const TrainingWindow window{ 1, 8 };
    TrainConfig config;
    config.epochs = 300;
    const LossWeights weights;

    const auto result = train(dataset, window, config, weights, 11, 2);
    REQUIRE(result.loss_history.size() == 300);
    for (const double loss : result.loss_history) {
        CHECK(std::isfinite(loss));
    }
    CHECK(result.loss_history.back() < result.loss_history.front());

    const auto collocation = collocation_points(window, 2);
    CHECK(total_loss(result.model, dataset, window, weights, collocation)
          <= result.loss_history.back());
}

TEST_CASE("weight decay shrinks the trained parameter norm")
{
    const auto dataset = train_dataset(8);
    const TrainingWindow window{ 1, 8 };
    const LossWeights weights;
    TrainConfig plain;
    plain.epochs = 400;
    plain.l2_coefficient = 0.0;
    TrainConfig decayed = plain;
    decayed.l2_coefficient = 1e-3;

    const auto free_fit = train(dataset, window, plain, weights, 3, 2);
    const auto shrunk = train(dataset, window, decayed, weights, 3, 2);
    CHECK(param_norm(shrunk.model.params)
          < param_norm(free_fit.model.params));
}

TEST_CASE("train validates its configuration")
{
    const auto dataset = train_dataset(8);
    const TrainingWindow window{ 1, 8 };
    const LossWeights weights;
    TrainConfig config;
    config.epochs = 5;

    SUBCASE("epoch count")
    {
        config.epochs = 0;
        CHECK_THROWS_AS(train(dataset, window, config, weights, 1),
                        InvalidArgument);
    }
    SUBCASE("learning rate")
    {
        config.learning_rate = 0.0;
        CHECK_THROWS_AS(train(dataset, window, config, weights, 1),
                        InvalidArgument);
    }
    SUBCASE("decay coefficient")
    {
        config.l2_coefficient = -1e-6;
        CHECK_THROWS_AS(train(dataset, window, config, weights, 1),
                        InvalidArgument);
    }
    SUBCASE("window length")
    {
        CHECK_THROWS_AS(
            train(dataset, TrainingWindow{ 1, 3 }, config, weights, 1),
            InvalidArgument);
    }
    SUBCASE("collocation density")
    {
        CHECK_THROWS_AS(train(dataset, window, config, weights, 1, 0),
                        InvalidArgument);
    }
}

TEST_CASE("a runaway learning rate raises DivergedLoss")
{
    const auto dataset = train_dataset(8);
    TrainConfig config;
    config.epochs = 3;
    config.learning_rate = 1e200;
    CHECK_THROWS_AS(
        train(dataset, TrainingWindow{ 1, 8 }, config, LossWeights{}, 1, 2),
        DivergedLoss);
}

TEST_CASE("predict_point denormalizes weekly totals and clamps at zero")
{
    const auto model = constant_rate_model();
    ScalingSpec scaling;
    scaling.scale = { 2, 4, 1, 1, 1 };
    scaling.offset = { 10, 1, 0.5, 0, 0 };

    // Weekly counter diffs (slope * 7/28): cases -10, hosp 1, deaths 0.5.
    // The normalize/denormalize pair cancels, so the forecast is the
    // person-unit weekly total, clamped at zero after denormalization.
    const auto forecasts = predict_point(model, scaling, 2);
    REQUIRE(forecasts.size() == 12);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const auto& forecast = forecasts[i];
        CHECK(forecast.origin_week == 2);
        CHECK(forecast.target == forecast_targets[i / 4]);
        CHECK(forecast.horizon == static_cast<int>(i % 4) + 1);
        CHECK(forecast.target_week() == forecast.origin_week + forecast.horizon);
    }
    CHECK(forecasts[0].value == 0.0); // cases clamped
    CHECK(forecasts[4].value == 0.5);
    CHECK(forecasts[8].value == 1.0);

    SUBCASE("custom horizon lists")
    {
        const std::array<int, 2> horizons{ 2, 5 };
        const auto custom = predict_point(model, scaling, 3, horizons);
        REQUIRE(custom.size() == 6);
        CHECK(custom[0].horizon == 2);
        CHECK(custom[1].horizon == 5);
        CHECK(custom[1].target_week() == 8);
    }
    SUBCASE("horizons below one are rejected")
    {
        const std::array<int, 1> bad{ 0 };
        CHECK_THROWS_AS(predict_point(model, scaling, 3, bad),
                        InvalidArgument);
    }
}

TEST_CASE("rolling_backtest is deterministic for any worker count")
{
    const auto dataset = train_dataset(10);
    BacktestConfig config;
    config.train.epochs = 60;
    config.train.seed = 9;
    config.first_origin = 6;
    config.last_origin = 9;
    config.collocation_per_week = 2;

    config.workers = 1;
    const auto serial = rolling_backtest(dataset, config);
    config.workers = 3;
    const auto threaded = rolling_backtest(dataset, config);

    CHECK(write_backtest_csv(serial) == write_backtest_csv(threaded));
    REQUIRE(serial.windows.size() == 4);
    REQUIRE(serial.forecasts.size() == 4 * 12);
    for (std::size_t i = 0; i < serial.windows.size(); ++i) {
        const auto& window = serial.windows[i];
        CHECK(window.origin_week == 6 + static_cast<int>(i));
        CHECK(window.converged);
        CHECK(window.attempts == 1);
        CHECK(window.seed
              == mix_seed(9, static_cast<std::uint64_t>(window.origin_week),
                          0));
    }
    // Forecasts are grouped by origin in ascending order.
    for (std::size_t i = 0; i < serial.forecasts.size(); ++i) {
        CHECK(serial.forecasts[i].origin_week == 6 + static_cast<int>(i / 12));
    }
}

TEST_CASE("diverged windows are retried with a fresh seed then skipped")
{
    const auto dataset = train_dataset(8);
    BacktestConfig config;
    config.train.epochs = 3;
    config.train.learning_rate = 1e200;
    config.train.seed = 7;
    config.first_origin = 6;
    config.last_origin = 7;

    const auto result = rolling_backtest(dataset, config);
    CHECK(result.forecasts.empty());
    REQUIRE(result.windows.size() == 2);
    for (const auto& window : result.windows) {
        CHECK_FALSE(window.converged);
        CHECK(window.attempts == 2);
        CHECK(window.seed
              == mix_seed(7, static_cast<std::uint64_t>(window.origin_week),
                          1));
    }
}

TEST_CASE("rolling_backtest validates its configuration")
{
    const auto dataset = train_dataset(10);
    BacktestConfig config;
    config.train.epochs = 2;
    config.first_origin = 6;
    config.last_origin = 8;

    SUBCASE("origins start at week 4")
    {
        config.first_origin = 3;
        CHECK_THROWS_AS(rolling_backtest(dataset, config), InvalidArgument);
    }
    SUBCASE("origin range must be ordered")
    {
        config.last_origin = 5;
        CHECK_THROWS_AS(rolling_backtest(dataset, config), InvalidArgument);
    }
    SUBCASE("origins must stay inside the dataset")
    {
        config.last_origin = 11;
        CHECK_THROWS_AS(rolling_backtest(dataset, config), InvalidArgument);
    }
    SUBCASE("trailing windows need at least 4 weeks")
    {
        config.window_length = 3;
        CHECK_THROWS_AS(rolling_backtest(dataset, config), InvalidArgument);
    }
    SUBCASE("worker count must be positive")
    {
        config.workers = 0;
        CHECK_THROWS_AS(rolling_backtest(dataset, config), InvalidArgument);
    }
}

TEST_CASE("backtest CSV keeps failed windows and round-trips")
{
    BacktestResult result;
    result.windows.push_back({ 6, 42, true, 1 });
    result.windows.push_back({ 7, 99, false, 2 });
    for (const auto target : forecast_targets) {
        for (const int horizon : default_horizons) {
            const auto value =
                100.0 + 10.0 * static_cast<double>(target) + horizon;
            result.forecasts.push_back({ target, horizon, 6, value });
        }
    }

    const auto text = write_backtest_csv(result);
    CHECK(text.find("origin_week,target,horizon,value,seed,converged\n")
          == 0);
    CHECK(text.find("6,cases,1,101,42,1\n") != std::string::npos);
    CHECK(text.find("6,deaths,3,113,42,1\n") != std::string::npos);
    CHECK(text.find("7,cases,1,0,99,0\n") != std::string::npos);
    CHECK(text.find("7,hosp,4,0,99,0\n") != std::string::npos);

    const auto parsed = read_backtest_csv(text);
    REQUIRE(parsed.windows.size() == 2);
    CHECK(parsed.windows[0].origin_week == 6);
    CHECK(parsed.windows[0].seed == 42);
    CHECK(parsed.windows[0].converged);
    CHECK(parsed.windows[1].origin_week == 7);
    CHECK(parsed.windows[1].seed == 99);
    CHECK_FALSE(parsed.windows[1].converged);
    // Failed rows carry no usable forecasts.
    REQUIRE(parsed.forecasts.size() == 12);
    for (std::size_t i = 0; i < parsed.forecasts.size(); ++i) {
        CHECK(parsed.forecasts[i].origin_week == 6);
        CHECK(parsed.forecasts[i].value == result.forecasts[i].value);
        CHECK(parsed.forecasts[i].target == result.forecasts[i].target);
        CHECK(parsed.forecasts[i].horizon == result.forecasts[i].horizon);
    }
    CHECK(write_backtest_csv(parsed) == text);

    SUBCASE("the header is validated")
    {
        CHECK_THROWS_AS(read_backtest_csv("origin,target\n1,cases\n"),
                        ParseError);
    }
    SUBCASE("unknown targets are rejected")
    {
        CHECK_THROWS_AS(
            read_backtest_csv("origin_week,target,horizon,value,seed,"
                              "converged\n6,icu,1,5,1,1\n"),
            ParseError);
    }
}

TEST_CASE("window_length_study scores each trailing-window variant")
{
    const auto dataset = train_dataset(12);
    BacktestConfig config;
    config.train.epochs = 40;
    config.train.seed = 21;
    config.first_origin = 7;
    config.last_origin = 9;
    config.collocation_per_week = 2;

    const auto study = window_length_study(dataset, { 4, 6 }, config);
    REQUIRE(study.size() == 2);
    CHECK(study[0].first == 4);
    CHECK(study[1].first == 6);
    for (const auto& [length, report] : study) {
        CHECK_FALSE(report.cells.empty());
        const auto label = "len" + std::to_string(length);
        for (const auto& cell : report.cells) {
            CHECK(cell.method == label);
            CHECK(std::isfinite(cell.mase));
            CHECK(cell.mase >= 0.0);
            CHECK(cell.n_evaluated > 0);
        }
    }
}
