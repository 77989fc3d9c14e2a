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

#include "epi/pinn.hpp"

#include "epi/csv.hpp"
#include "epi/errors.hpp"
#include "epi/quantiles.hpp"
#include "epi/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace epi {

auto sigmoid(double x) -> double
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

auto softplus(double x) -> double
{
    if (x > 30.0) {
        return x;
    }
    if (x < -30.0) {
        return std::exp(x);
    }
    return std::log1p(std::exp(x));
}

auto PinnModel::total_param_count() const -> int
{
    return param_count(state_config) + param_count(factor_config) + 2;
}

auto PinnModel::state_params() const -> std::span<const double>
{
    return { params.data(), static_cast<std::size_t>(
                                param_count(state_config)) };
}

auto PinnModel::factor_params() const -> std::span<const double>
{
    return { params.data() + param_count(state_config),
             static_cast<std::size_t>(param_count(factor_config)) };
}

auto PinnModel::p_h() const -> double
{
    return sigmoid(params[params.size() - 2]);
}

auto PinnModel::p_d() const -> double
{
    return sigmoid(params[params.size() - 1]);
}

auto PinnModel::beta_at(double tau) const -> double
{
    return softplus(forward(factor_config, factor_params(), tau)[2]);
}

namespace {

constexpr std::size_t idx_zr = 4; // cumulative reported cases
constexpr std::size_t idx_a = 6;  // cumulative hospital admissions
constexpr std::size_t idx_dr = 8; // cumulative reported deaths

auto check_window(const TrainingWindow& window) -> void
{
    if (window.first_week < 1 || window.last_week < window.first_week + 3) {
        throw InvalidArgument("training window needs at least 4 weeks");
    }
}

auto window_start_day(const TrainingWindow& window) -> double
{
    return 7.0 * (window.first_week - 1);
}

auto window_span_days(const TrainingWindow& window) -> double
{
    return 7.0 * (window.last_week - window.first_week + 1);
}

// p_h = p_d = 0.1 at initialization.
constexpr double initial_probability_raw = -2.1972245773362196;

auto counter_index(Channel target) -> std::size_t
{
    switch (target) {
    case Channel::cases: return idx_zr;
    case Channel::deaths: return idx_dr;
    case Channel::hosp: return idx_a;
    default:
        throw InvalidArgument("channel has no cumulative counter");
    }
}

} // namespace

auto derive_compartment_scaling(const Dataset& dataset,
                                const RateParams& rates)
    -> std::array<double, compartment_count>
{
    const auto& scaling = dataset.scaling;
    const auto flow_scale = [&](Channel channel) {
        return std::max(scaling.scale[static_cast<std::size_t>(channel)],
                        1e-9);
    };
    const auto cumulative_scale = [&](Channel channel) {
        const auto& series = dataset.channel(channel);
        double total = 0.0;
        for (const double value : series.values) {
            total += scaling.denormalize(channel, value);
        }
        return std::max(total, 1.0);
    };
    std::array<double, compartment_count> scale{};
    scale[0] = rates.population;                        // X
    scale[1] = flow_scale(Channel::cases);              // L
    scale[2] = flow_scale(Channel::cases);              // Y
    scale[3] = flow_scale(Channel::cases);              // Z
    scale[idx_zr] = cumulative_scale(Channel::cases);   // Z_r
    scale[5] = flow_scale(Channel::hosp);               // H
    scale[idx_a] = cumulative_scale(Channel::hosp);     // A
    scale[7] = flow_scale(Channel::deaths);             // D
    scale[idx_dr] = cumulative_scale(Channel::deaths);  // D_r
    return scale;
}

auto make_model(const Dataset& dataset,
                const TrainingWindow& window,
                std::uint64_t seed) -> PinnModel
{
    check_window(window);
    if (window.last_week > dataset.channel(Channel::cases).last_week()) {
        throw InvalidArgument("training window extends past the dataset");
    }
    PinnModel model;
    model.compartment_scale = derive_compartment_scaling(dataset, model.rates);
    model.t0_days = window_start_day(window);
    model.span_days = window_span_days(window);
    model.params = init_params(model.state_config, mix_seed(seed, 1, 0));
    const auto factor = init_params(model.factor_config, mix_seed(seed, 2, 0));
    model.params.insert(model.params.end(), factor.begin(), factor.end());
    model.params.push_back(initial_probability_raw);
    model.params.push_back(initial_probability_raw);
    return model;
}

auto observables(const PinnModel& model,
                 const ScalingSpec& scaling,
                 double t_days) -> std::array<double, channel_count>
{
    const auto u1 =
        forward(model.state_config, model.state_params(), model.tau(t_days));
    const auto u0 = forward(model.state_config, model.state_params(),
                            model.tau(t_days - 7.0));
    const auto factor = forward(model.factor_config, model.factor_params(),
                                model.tau(t_days));
    std::array<double, channel_count> out{};
    for (const auto target : forecast_targets) {
        const auto counter = counter_index(target);
        const double weekly = model.compartment_scale[counter]
                              * (u1[counter] - u0[counter]);
        out[static_cast<std::size_t>(target)] =
            scaling.normalize(target, weekly);
    }
    out[static_cast<std::size_t>(Channel::mobility)] = factor[0];
    out[static_cast<std::size_t>(Channel::vaccines)] = factor[1];
    return out;
}

auto collocation_points(const TrainingWindow& window, int per_week)
    -> std::vector<double>
{
    check_window(window);
    if (per_week < 1) {
        throw InvalidArgument("collocation density must be >= 1 per week");
    }
    const int count = per_week * (window.last_week - window.first_week + 1);
    const double t0 = window_start_day(window);
    const double span = window_span_days(window);
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        points.push_back(t0
                         + span * static_cast<double>(i)
                               / static_cast<double>(count - 1));
    }
    return points;
}

auto data_loss(const PinnModel& model,
               const Dataset& dataset,
               const TrainingWindow& window,
               const LossWeights& weights) -> double
{
    check_window(window);
    // One observable evaluation per window week, shared by the channels.
    double loss = 0.0;
    std::array<double, channel_count> sums{};
    std::array<int, channel_count> counts{};
    for (int week = window.first_week; week <= window.last_week; ++week) {
        const auto prediction =
            observables(model, dataset.scaling, 7.0 * week);
        for (const auto channel : all_channels) {
            const auto c = static_cast<std::size_t>(channel);
            const auto& series = dataset.channel(channel);
            if (!series.has_week(week)) {
                continue;
            }
            const double error = prediction[c] - series.at_week(week);
            sums[c] += error * error;
            ++counts[c];
        }
    }
    bool any = false;
    for (std::size_t c = 0; c < channel_count; ++c) {
        if (counts[c] > 0) {
            any = true;
            loss += weights.data[c] * sums[c] / counts[c];
        }
    }
    if (!any) {
        throw InvalidArgument("data_loss: window has no observations");
    }
    return loss;
}

auto initial_loss(const PinnModel& model,
                  const Dataset& dataset,
                  const TrainingWindow& window) -> double
{
    check_window(window);
    const auto prediction =
        observables(model, dataset.scaling, 7.0 * window.first_week);
    double sum = 0.0;
    int count = 0;
    for (const auto channel : all_channels) {
        const auto& series = dataset.channel(channel);
        if (!series.has_week(window.first_week)) {
            continue;
        }
        const double error = prediction[static_cast<std::size_t>(channel)]
                             - series.at_week(window.first_week);
        sum += error * error;
        ++count;
    }
    if (count == 0) {
        throw InvalidArgument("initial_loss: first week has no observations");
    }
    return sum / count;
}

namespace {

// Everything the residual and its reverse pass need at one time point.
struct ResidualPoint
{
    CompartmentState x{};    // person units
    CompartmentState f{};    // normalized residual
    double beta = 0.0;
    double beta_raw = 0.0;
};

auto eval_residual(const PinnModel& model,
                   std::span<const double> u,
                   std::span<const double> udot,
                   double beta_raw,
                   ResidualPoint& point) -> void
{
    point.beta_raw = beta_raw;
    point.beta = softplus(beta_raw);
    RateParams rates = model.rates;
    rates.p_h = model.p_h();
    rates.p_d = model.p_d();
    for (std::size_t i = 0; i < compartment_count; ++i) {
        point.x[i] = model.compartment_scale[i] * u[i];
    }
    const auto flows = rhs(point.x, point.beta, rates);
    for (std::size_t i = 0; i < compartment_count; ++i) {
        point.f[i] = udot[i] / model.span_days
                     - flows[i] / model.compartment_scale[i];
    }
}

} // namespace

auto residual_loss(const PinnModel& model,
                   const std::vector<double>& collocation,
                   const LossWeights& weights) -> double
{
    if (collocation.empty()) {
        throw InvalidArgument("residual_loss: no collocation points");
    }
    double total = 0.0;
    ResidualPoint point;
    for (const double t : collocation) {
        const auto [u, udot] = forward_with_time_grad(
            model.state_config, model.state_params(), model.tau(t));
        const auto factor = forward(model.factor_config,
                                    model.factor_params(), model.tau(t));
        eval_residual(model, u, udot, factor[2], point);
        double sum = 0.0;
        for (std::size_t i = 0; i < compartment_count; ++i) {
            const double weighted = weights.equation[i] * point.f[i];
            sum += weighted * weighted;
        }
        total += sum / compartment_count;
    }
    return total / static_cast<double>(collocation.size());
}

auto total_loss(const PinnModel& model,
                const Dataset& dataset,
                const TrainingWindow& window,
                const LossWeights& weights,
                const std::vector<double>& collocation) -> double
{
    const double data = data_loss(model, dataset, window, weights);
    if (weights.w_ode == 0.0) {
        return data;
    }
    return data
           + weights.w_ode
                 * (initial_loss(model, dataset, window)
                    + residual_loss(model, collocation, weights));
}

auto total_loss_grad(const PinnModel& model,
                     const Dataset& dataset,
                     const TrainingWindow& window,
                     const LossWeights& weights,
                     const std::vector<double>& collocation,
                     std::span<double> grad) -> double
{
    check_window(window);
    if (static_cast<int>(grad.size()) != model.total_param_count()) {
        throw InvalidArgument("gradient buffer length mismatch");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const auto n_state = static_cast<std::size_t>(
        param_count(model.state_config));
    const auto n_factor = static_cast<std::size_t>(
        param_count(model.factor_config));
    auto grad_state = grad.subspan(0, n_state);
    auto grad_factor = grad.subspan(n_state, n_factor);
    double& grad_ph_raw = grad[n_state + n_factor];
    double& grad_pd_raw = grad[n_state + n_factor + 1];
    const auto state_params = model.state_params();
    const auto factor_params = model.factor_params();
    const auto& scale = model.compartment_scale;
    const auto& scaling = dataset.scaling;

    MlpWorkspace ws_now;
    MlpWorkspace ws_prev;
    MlpWorkspace ws_factor;
    std::array<double, compartment_count> bar_now{};
    std::array<double, compartment_count> bar_prev{};
    std::array<double, compartment_count> bar_dot{};
    std::array<double, 3> bar_factor{};
    const std::array<double, compartment_count> zero9{};
    const std::array<double, 3> zero3{};

    // Per-channel observation counts inside the window.
    std::array<int, channel_count> counts{};
    for (const auto channel : all_channels) {
        const auto& series = dataset.channel(channel);
        for (int week = window.first_week; week <= window.last_week; ++week) {
            if (series.has_week(week)) {
                ++counts[static_cast<std::size_t>(channel)];
            }
        }
    }
    int initial_count = 0;
    for (const auto channel : all_channels) {
        if (dataset.channel(channel).has_week(window.first_week)) {
            ++initial_count;
        }
    }
    if (initial_count == 0) {
        throw InvalidArgument("total_loss_grad: first week has no data");
    }

    double data = 0.0;
    double initial = 0.0;
    for (int week = window.first_week; week <= window.last_week; ++week) {
        const double t = 7.0 * week;
        eval(model.state_config, state_params, model.tau(t), ws_now);
        eval(model.state_config, state_params, model.tau(t - 7.0), ws_prev);
        eval(model.factor_config, factor_params, model.tau(t), ws_factor);
        bar_now.fill(0.0);
        bar_prev.fill(0.0);
        bar_factor.fill(0.0);
        const auto u1 = ws_now.output();
        const auto u0 = ws_prev.output();
        const auto factor = ws_factor.output();
        const bool is_first = (week == window.first_week);
        for (const auto channel : all_channels) {
            const auto c = static_cast<std::size_t>(channel);
            const auto& series = dataset.channel(channel);
            if (!series.has_week(week)) {
                continue;
            }
            double predicted = 0.0;
            if (is_count_channel(channel)) {
                const auto counter = counter_index(channel);
                predicted = scaling.normalize(
                    channel, scale[counter] * (u1[counter] - u0[counter]));
            } else {
                predicted = (channel == Channel::mobility) ? factor[0]
                                                           : factor[1];
            }
            const double error = predicted - series.at_week(week);
            data += weights.data[c] * error * error / counts[c];
            double coeff = 2.0 * weights.data[c] * error / counts[c];
            if (is_first && weights.w_ode != 0.0) {
                initial += error * error / initial_count;
                coeff += weights.w_ode * 2.0 * error / initial_count;
            }
            if (is_count_channel(channel)) {
                const auto counter = counter_index(channel);
                const double through =
                    coeff * scale[counter] / scaling.scale[c];
                bar_now[counter] += through;
                bar_prev[counter] -= through;
            } else if (channel == Channel::mobility) {
                bar_factor[0] += coeff;
            } else {
                bar_factor[1] += coeff;
            }
        }
        backprop(model.state_config, state_params, ws_now, bar_now, zero9,
                 grad_state);
        backprop(model.state_config, state_params, ws_prev, bar_prev, zero9,
                 grad_state);
        backprop(model.factor_config, factor_params, ws_factor, bar_factor,
                 zero3, grad_factor);
    }

    double residual = 0.0;
    if (weights.w_ode != 0.0) {
        if (collocation.empty()) {
            throw InvalidArgument("total_loss_grad: no collocation points");
        }
        RateParams rates = model.rates;
        const double p_h = model.p_h();
        const double p_d = model.p_d();
        rates.p_h = p_h;
        rates.p_d = p_d;
        const double n_points = static_cast<double>(collocation.size());
        ResidualPoint point;
        std::array<double, compartment_count> q{};
        for (const double t : collocation) {
            eval(model.state_config, state_params, model.tau(t), ws_now);
            eval(model.factor_config, factor_params, model.tau(t), ws_factor);
            eval_residual(model, ws_now.output(), ws_now.output_dot(),
                          ws_factor.output()[2], point);
            double sum = 0.0;
            for (std::size_t i = 0; i < compartment_count; ++i) {
                const double weighted = weights.equation[i] * point.f[i];
                sum += weighted * weighted;
            }
            residual += sum / compartment_count / n_points;
            // g_i = dL/df_i with the w_ODE factor folded in; q_i = g_i
            // scaled into person units for the Jacobian products.
            for (std::size_t i = 0; i < compartment_count; ++i) {
                const double g = weights.w_ode * 2.0
                                 * weights.equation[i] * weights.equation[i]
                                 * point.f[i] / compartment_count / n_points;
                bar_dot[i] = g / model.span_days;
                q[i] = g / scale[i];
            }
            const auto& x = point.x;
            const double beta = point.beta;
            const double n_pop = rates.population;
            // bar_x = -J^T q for the flow Jacobian J = d rhs / d x.
            std::array<double, compartment_count> bar_x{};
            bar_x[0] = (q[0] - q[1]) * beta * x[2] / n_pop;
            bar_x[1] = rates.eta * (q[1] - q[2]);
            bar_x[2] = (q[0] - q[1]) * beta * x[0] / n_pop
                       + rates.gamma * q[2] - rates.rho * rates.gamma * q[3]
                       - p_h * rates.gamma * (q[5] + q[6]);
            bar_x[3] = rates.gamma_z * (q[3] - q[4]);
            bar_x[5] = rates.gamma_h * q[5] - p_d * rates.gamma_h * q[7];
            bar_x[7] = rates.gamma_d * (q[7] - q[8]);
            for (std::size_t i = 0; i < compartment_count; ++i) {
                bar_now[i] = bar_x[i] * scale[i];
            }
            backprop(model.state_config, state_params, ws_now, bar_now,
                     bar_dot, grad_state);
            const double bar_beta = (q[0] - q[1]) * x[0] * x[2] / n_pop;
            bar_factor.fill(0.0);
            bar_factor[2] = bar_beta * sigmoid(point.beta_raw);
            backprop(model.factor_config, factor_params, ws_factor,
                     bar_factor, zero3, grad_factor);
            const double bar_p_h =
                -rates.gamma * x[2] * (q[5] + q[6]);
            const double bar_p_d = -rates.gamma_h * x[5] * q[7];
            grad_ph_raw += bar_p_h * p_h * (1.0 - p_h);
            grad_pd_raw += bar_p_d * p_d * (1.0 - p_d);
        }
    }
    if (weights.w_ode == 0.0) {
        return data;
    }
    return data + weights.w_ode * (initial + residual);
}

auto train(const Dataset& dataset,
           const TrainingWindow& window,
           const TrainConfig& config,
           const LossWeights& weights,
           std::uint64_t seed,
           int collocation_per_week) -> TrainResult
{
    if (config.epochs < 1 || config.learning_rate <= 0.0
        || config.l2_coefficient < 0.0) {
        throw InvalidArgument("invalid training configuration");
    }
    TrainResult result{ make_model(dataset, window, seed), {} };
    auto& model = result.model;
    const auto collocation = collocation_points(window, collocation_per_week);
    AdamState adam(model.params.size());
    std::vector<double> grad(model.params.size(), 0.0);
    result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
    for (long long epoch = 0; epoch < config.epochs; ++epoch) {
        const double loss = total_loss_grad(model, dataset, window, weights,
                                            collocation, grad);
        if (!std::isfinite(loss)) {
            throw DivergedLoss("loss became non-finite at epoch "
                               + std::to_string(epoch) + " (window "
                               + std::to_string(window.first_week) + ".."
                               + std::to_string(window.last_week) + ")");
        }
        adam_step(model.params, grad, adam, config);
        result.loss_history.push_back(loss);
    }
    return result;
}

auto predict_point(const PinnModel& model,
                   const ScalingSpec& scaling,
                   int origin_week,
                   std::span<const int> horizons) -> std::vector<PointForecast>
{
    std::vector<PointForecast> forecasts;
    forecasts.reserve(forecast_targets.size() * horizons.size());
    for (const auto target : forecast_targets) {
        for (const int horizon : horizons) {
            if (horizon < 1) {
                throw InvalidArgument("horizon must be >= 1");
            }
            const auto prediction = observables(
                model, scaling, 7.0 * (origin_week + horizon));
            const double value = scaling.denormalize(
                target, prediction[static_cast<std::size_t>(target)]);
            forecasts.push_back(
                { target, horizon, origin_week, std::max(0.0, value) });
        }
    }
    return forecasts;
}

auto rolling_backtest(const Dataset& dataset, const BacktestConfig& config)
    -> BacktestResult
{
    if (config.first_origin < 4 || config.last_origin < config.first_origin) {
        throw InvalidArgument("invalid origin range");
    }
    if (config.last_origin > dataset.channel(Channel::cases).last_week()) {
        throw InvalidArgument("origin range extends past the dataset");
    }
    if (config.window_length != 0 && config.window_length < 4) {
        throw InvalidArgument("window length must be 0 (expanding) or >= 4");
    }
    if (config.workers < 1) {
        throw InvalidArgument("worker count must be >= 1");
    }
    const int jobs = config.last_origin - config.first_origin + 1;
    std::vector<WindowRecord> records(static_cast<std::size_t>(jobs));
    std::vector<std::vector<PointForecast>> outputs(
        static_cast<std::size_t>(jobs));
    std::atomic<int> next{ 0 };
    std::mutex error_mutex;
    std::exception_ptr error;

    const auto run_window = [&](int job) {
        const int origin = config.first_origin + job;
        TrainingWindow window;
        window.first_week =
            (config.window_length > 0)
                ? std::max(1, origin - config.window_length + 1)
                : 1;
        window.last_week = origin;
        auto& record = records[static_cast<std::size_t>(job)];
        record.origin_week = origin;
        for (int attempt = 0; attempt < 2 && !record.converged; ++attempt) {
            const auto seed =
                mix_seed(config.train.seed,
                         static_cast<std::uint64_t>(origin),
                         static_cast<std::uint64_t>(attempt));
            record.seed = seed;
            record.attempts = attempt + 1;
            try {
                auto trained = train(dataset, window, config.train,
                                     config.weights, seed,
                                     config.collocation_per_week);
                outputs[static_cast<std::size_t>(job)] =
                    predict_point(trained.model, dataset.scaling, origin,
                                  config.horizons);
                record.converged = true;
            } catch (const DivergedLoss&) {
                // retried once with a fresh seed, then recorded as skipped
            }
        }
    };
    const auto worker = [&] {
        while (true) {
            const int job = next.fetch_add(1);
            if (job >= jobs) {
                return;
            }
            try {
                run_window(job);
            } catch (...) {
                const std::scoped_lock lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(jobs);
                return;
            }
        }
    };
    const int thread_count = std::min(config.workers, jobs);
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int i = 0; i < thread_count; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    BacktestResult result;
    for (int job = 0; job < jobs; ++job) {
        result.windows.push_back(records[static_cast<std::size_t>(job)]);
        const auto& forecasts = outputs[static_cast<std::size_t>(job)];
        result.forecasts.insert(result.forecasts.end(), forecasts.begin(),
                                forecasts.end());
    }
    return result;
}

auto window_length_study(const Dataset& dataset,
                         const std::vector<int>& lengths,
                         const BacktestConfig& config)
    -> std::vector<std::pair<int, ScoreReport>>
{
    std::vector<std::pair<int, ScoreReport>> out;
    out.reserve(lengths.size());
    for (const int length : lengths) {
        BacktestConfig variant = config;
        variant.window_length = length;
        const auto backtest = rolling_backtest(dataset, variant);
        const auto quantiles =
            build_quantile_series(backtest.forecasts, dataset);
        out.emplace_back(length,
                         build_report(quantiles, dataset,
                                      "len" + std::to_string(length)));
    }
    return out;
}

auto write_backtest_csv(const BacktestResult& result) -> std::string
{
    std::map<int, std::vector<const PointForecast*>> by_origin;
    for (const auto& forecast : result.forecasts) {
        by_origin[forecast.origin_week].push_back(&forecast);
    }
    std::ostringstream out;
    out << "origin_week,target,horizon,value,seed,converged\n";
    for (const auto& window : result.windows) {
        if (window.converged) {
            for (const auto* forecast : by_origin[window.origin_week]) {
                out << forecast->origin_week << ','
                    << channel_name(forecast->target) << ','
                    << forecast->horizon << ','
                    << format_double(forecast->value) << ',' << window.seed
                    << ",1\n";
            }
        } else {
            for (const auto target : forecast_targets) {
                for (const int horizon : default_horizons) {
                    out << window.origin_week << ',' << channel_name(target)
                        << ',' << horizon << ",0," << window.seed << ",0\n";
                }
            }
        }
    }
    return out.str();
}

auto read_backtest_csv(const std::string& text) -> BacktestResult
{
    const auto table = parse_csv(text);
    const std::vector<std::string> expected{
        "origin_week", "target", "horizon", "value", "seed", "converged",
    };
    if (table.header != expected) {
        throw ParseError("unexpected backtest header");
    }
    BacktestResult result;
    std::map<int, WindowRecord> windows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        if (row.size() != 6) {
            throw ParseError("expected 6 fields", line);
        }
        const auto origin = static_cast<int>(parse_long(row[0], line));
        const auto target = channel_from_name(row[1]);
        if (!target) {
            throw ParseError("unknown target '" + row[1] + "'", line);
        }
        const auto horizon = static_cast<int>(parse_long(row[2], line));
        const double value = parse_double(row[3], line);
        char* end = nullptr;
        const std::uint64_t seed = std::strtoull(row[4].c_str(), &end, 10);
        if (end == row[4].c_str() || *end != '\0') {
            throw ParseError("invalid seed '" + row[4] + "'", line);
        }
        const bool converged = parse_long(row[5], line) != 0;
        auto& window = windows[origin];
        window.origin_week = origin;
        window.seed = seed;
        window.converged = converged;
        if (converged) {
            result.forecasts.push_back({ *target, horizon, origin, value });
        }
    }
    for (const auto& [origin, window] : windows) {
        result.windows.push_back(window);
    }
    return result;
}

} // namespace epi
