// Acceptance gate: one line per criterion, nonzero exit when any
// gating criterion fails.  The final criterion is an advisory
// full-data run enabled by EPIFORECAST_REAL_DATA_DIR.

#include "epi/compartment.hpp"
#include "epi/csv.hpp"
#include "epi/data_pipeline.hpp"
#include "epi/mlp.hpp"
#include "epi/pinn.hpp"
#include "epi/quantiles.hpp"
#include "epi/rng.hpp"
#include "epi/scoring.hpp"
#include "epi/series.hpp"
#include "epi/synthetic.hpp"

#include "normal_oracle.hpp"
#include "reference_wis.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

using namespace epi;

namespace {

struct Outcome
{
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

auto now() -> std::chrono::steady_clock::time_point
{
    return std::chrono::steady_clock::now();
}

auto seconds_since(std::chrono::steady_clock::time_point t0) -> double
{
    return std::chrono::duration<double>(now() - t0).count();
}

auto format(const char* fmt, ...) -> std::string
{
    va_list args;
    va_start(args, fmt);
    char buffer[256];
    std::vsnprintf(buffer, sizeof buffer, fmt, args);
    va_end(args);
    return buffer;
}

// |a - b| relative to the larger magnitude, floored so near-zero pairs
// compare absolutely.
auto rel_err(double a, double b) -> double
{
    return std::abs(a - b) / std::max({ 1e-3, std::abs(a), std::abs(b) });
}

auto random_dataset(Rng& rng, int weeks) -> Dataset
{
    Dataset dataset;
    for (auto channel : all_channels) {
        auto& series = dataset.channel(channel);
        series.first_week = 1;
        for (int w = 0; w < weeks; ++w) {
            series.values.push_back(0.1 + 0.8 * rng.uniform());
        }
    }
    return dataset;
}

// Randomly sized two-subnet model over the given window, small enough
// that finite differences over every parameter stay cheap.
auto random_model(Rng& rng,
                  const Dataset& dataset,
                  const TrainingWindow& window,
                  std::uint64_t seed) -> PinnModel
{
    PinnModel model;
    model.state_config =
        MLPConfig{ 1, 1 + static_cast<int>(rng.uniform() * 2.0),
                   2 + static_cast<int>(rng.uniform() * 5.0),
                   compartment_count };
    model.factor_config =
        MLPConfig{ 1, 1, 2 + static_cast<int>(rng.uniform() * 4.0), 3 };
    model.compartment_scale = derive_compartment_scaling(dataset, model.rates);
    model.t0_days = 7.0 * (window.first_week - 1);
    model.span_days = 7.0 * (window.last_week - window.first_week + 1);
    model.params = init_params(model.state_config, mix_seed(seed, 1, 0));
    const auto factor = init_params(model.factor_config, mix_seed(seed, 2, 0));
    model.params.insert(model.params.end(), factor.begin(), factor.end());
    model.params.push_back(-2.1972245773362196);
    model.params.push_back(-2.1972245773362196);
    return model;
}

// ---------------------------------------------------------------------
// 1. Analytic gradients against central finite differences.

auto check_gradients() -> Outcome
{
    const auto t0 = now();
    const double h = 1e-5;
    Rng rng(1001);
    double worst = 0.0;
    const TrainingWindow window{ 1, 5 };
    const LossWeights weights;

    for (int trial = 0; trial < 100; ++trial) {
        const auto dataset = random_dataset(rng, 5);
        auto model = random_model(rng, dataset, window,
                                  static_cast<std::uint64_t>(trial));

        // Direct network gradient of a random linear functional.
        std::vector<double> upstream(compartment_count);
        for (auto& u : upstream) {
            u = rng.normal();
        }
        const double t = rng.uniform();
        std::vector<double> state_params(model.state_params().begin(),
                                         model.state_params().end());
        const auto analytic =
            grad_params(model.state_config, state_params, t, upstream);
        const auto functional = [&](const std::vector<double>& params) {
            const auto out = forward(model.state_config, params, t);
            double dot = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                dot += upstream[i] * out[i];
            }
            return dot;
        };
        for (std::size_t i = 0; i < state_params.size(); ++i) {
            auto probe = state_params;
            probe[i] = state_params[i] + h;
            const double hi = functional(probe);
            probe[i] = state_params[i] - h;
            const double lo = functional(probe);
            worst = std::max(worst, rel_err(analytic[i], (hi - lo) / (2 * h)));
        }

        // Full training gradient, including the residual time-derivative
        // path.
        const auto collocation = collocation_points(window, 2);
        std::vector<double> grad(model.params.size(), 0.0);
        total_loss_grad(model, dataset, window, weights, collocation, grad);
        for (std::size_t i = 0; i < model.params.size(); ++i) {
            const double saved = model.params[i];
            model.params[i] = saved + h;
            const double hi =
                total_loss(model, dataset, window, weights, collocation);
            model.params[i] = saved - h;
            const double lo =
                total_loss(model, dataset, window, weights, collocation);
            model.params[i] = saved;
            worst = std::max(worst, rel_err(grad[i], (hi - lo) / (2 * h)));
        }
    }
    const double elapsed = seconds_since(t0);
    return { worst < 1e-3 && elapsed < 60.0, false,
             format("worst relative error %.2e over 100 configs, %.1f s",
                    worst, elapsed) };
}

// ---------------------------------------------------------------------
// 2. Integrator trajectories satisfy the flow equations; empirical
// convergence order stays fourth order.

auto check_trajectory_residual() -> Outcome
{
    const auto scenario = default_synthetic_scenario();
    const double dt = 0.01;
    const auto beta_fn = [&](double t) { return scenario.beta(t); };
    const auto trajectory = integrate_rk4(scenario.initial, beta_fn,
                                          scenario.params, 0.0, 420.0, dt);

    std::array<double, compartment_count> scale{};
    for (const auto& point : trajectory) {
        for (std::size_t i = 0; i < compartment_count; ++i) {
            scale[i] = std::max({ scale[i], std::abs(point.state[i]), 1.0 });
        }
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
        const auto flows = rhs(trajectory[k].state,
                               scenario.beta(trajectory[k].t),
                               scenario.params);
        for (std::size_t i = 0; i < compartment_count; ++i) {
            const double central = (trajectory[k + 1].state[i]
                                    - trajectory[k - 1].state[i])
                                   / (2.0 * dt);
            worst = std::max(worst, std::abs(central - flows[i]) / scale[i]);
        }
    }

    // Pure exposed-decay flow with a closed form: L(t) = exp(-eta t),
    // Y(t) = eta t exp(-eta t) when eta == gamma and nothing re-enters.
    RateParams rates;
    rates.rho = 0.0;
    rates.p_h = 0.0;
    rates.p_d = 0.0;
    CompartmentState initial{};
    initial[1] = 1.0;
    const auto zero_beta = [](double) { return 0.0; };
    const auto decay_error = [&](double step) {
        const auto run =
            integrate_rk4(initial, zero_beta, rates, 0.0, 10.0, step);
        const auto& last = run.back().state;
        const double l_exact = std::exp(-2.5);
        const double y_exact = 2.5 * std::exp(-2.5);
        return std::abs(last[1] - l_exact) + std::abs(last[2] - y_exact);
    };
    const double order =
        std::log2(decay_error(0.5) / decay_error(0.25));

    const bool pass = worst < 1e-3 && order > 3.5 && order < 4.5;
    return { pass, false,
             format("max normalized residual %.2e, convergence order %.2f",
                    worst, order) };
}

// ---------------------------------------------------------------------
// 3. Training recovers noise-free synthetic observables.

auto check_synthetic_recovery() -> Outcome
{
    const auto t0 = now();
    SyntheticOptions options;
    options.weeks = 30;
    const auto dataset =
        synthetic_dataset(default_synthetic_scenario(), options);
    const TrainingWindow window{ 1, options.weeks };
    TrainConfig config;
    config.epochs = 5000;

    const auto result = train(dataset, window, config, LossWeights{}, 20);

    double worst = 0.0;
    for (const auto channel : all_channels) {
        double num = 0.0;
        double den = 0.0;
        for (int week = 1; week <= options.weeks; ++week) {
            const auto prediction =
                observables(result.model, dataset.scaling, 7.0 * week);
            const double error =
                prediction[static_cast<std::size_t>(channel)]
                - dataset.channel(channel).at_week(week);
            num += error * error;
            den += dataset.channel(channel).at_week(week)
                   * dataset.channel(channel).at_week(week);
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    const double elapsed = seconds_since(t0);
    return { worst < 0.05 && elapsed < 300.0, false,
             format("worst channel relative L2 %.4f, %.0f s", worst,
                    elapsed) };
}

// ---------------------------------------------------------------------
// 4. The rolling backtest beats the naive baseline at one week on a
// noisy two-wave epidemic.

auto check_synthetic_backtest() -> Outcome
{
    const auto t0 = now();
    SyntheticOptions options;
    options.weeks = 60;
    options.noise = 0.02;
    options.noise_seed = 7;
    const auto dataset =
        synthetic_dataset(default_synthetic_scenario(), options);

    BacktestConfig config;
    config.train.epochs = 5000;
    config.train.seed = 20;
    config.first_origin = 17;
    config.last_origin = 56;
    config.workers = 4;

    const auto result = rolling_backtest(dataset, config);
    int skipped = 0;
    for (const auto& window : result.windows) {
        if (!window.converged) {
            ++skipped;
        }
    }
    const auto quantiles = build_quantile_series(result.forecasts, dataset);
    const auto report = build_report(quantiles, dataset, "pinn");

    double worst = 0.0;
    std::string mase_text;
    for (const auto target : forecast_targets) {
        const auto* cell = report.find("pinn", target, 1);
        if (cell == nullptr) {
            return { false, false, "missing horizon-1 score cell" };
        }
        worst = std::max(worst, cell->mase);
        mase_text += format("%s %.3f ",
                            std::string(channel_name(target)).c_str(),
                            cell->mase);
    }
    const double elapsed = seconds_since(t0);
    return { worst < 1.0 && elapsed < 1800.0, false,
             format("horizon-1 MASE %s(%d skipped), %.0f s",
                    mase_text.c_str(), skipped, elapsed) };
}

// ---------------------------------------------------------------------
// 5. Interval scores match hand formulas and an independent scorer.

auto check_scoring_exactness() -> Outcome
{
    Rng rng(2026);

    double worst_point = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double mu = 1000.0 * rng.uniform();
        const double y = 1200.0 * rng.uniform() - 100.0;
        const auto forecast =
            build_quantile_forecast({ Channel::cases, 1, 5, mu }, 0.0);
        worst_point =
            std::max(worst_point, std::abs(wis(forecast, y) - std::abs(y - mu)));
    }

    const bool worked_examples =
        rel_err(interval_score(1, 3, 0.2, 2), 2.0) < 1e-12
        && rel_err(interval_score(1, 3, 0.2, 4), 12.0) < 1e-12
        && rel_err(interval_score(1, 3, 0.5, 0), 6.0) < 1e-12;

    double worst_ref = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double mu = 500.0 + 200.0 * rng.uniform();
        const double sigma = 1.0 + 20.0 * rng.uniform();
        const double y = mu + 3.0 * sigma * (2.0 * rng.uniform() - 1.0);
        const auto forecast = build_quantile_forecast(
            { Channel::deaths, 2, 9, mu }, sigma);
        const double ours = wis(forecast, y);
        const double reference = testutil::reference_wis(forecast, y);
        worst_ref = std::max(worst_ref, std::abs(ours - reference)
                                            / std::max(1e-12, reference));
    }

    const bool pass =
        worst_point < 1e-12 && worked_examples && worst_ref < 1e-9;
    return { pass, false,
             format("point-mass gap %.1e, reference gap %.1e, examples %s",
                    worst_point, worst_ref, worked_examples ? "ok" : "off") };
}

// ---------------------------------------------------------------------
// 6. Normal quantiles invert the oracle distribution function.

auto check_normal_quantiles() -> Outcome
{
    double worst = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const double p = (i + 0.5) / 10'000.0;
        const double z = inverse_normal_cdf(p);
        worst = std::max(worst, std::abs(testutil::normal_cdf_oracle(z) - p));
    }
    const double upper = gaussian_quantile(0.0, 1.0, 0.975);
    const bool pass = worst < 1e-9 && std::abs(upper - 1.95996) < 1e-4;
    return { pass, false,
             format("max |CDF(z) - p| %.2e, q(0.975) = %.5f", worst, upper) };
}

// ---------------------------------------------------------------------
// 7. The naive baseline scores exactly one against itself.

auto check_naive_identity() -> Outcome
{
    Dataset dataset;
    for (int w = 1; w <= 20; ++w) {
        const auto t = static_cast<double>(w);
        dataset.channel(Channel::cases).values.push_back(100.0 + 10.0 * t);
        dataset.channel(Channel::deaths).values.push_back(5.0 + t);
        dataset.channel(Channel::hosp).values.push_back(40.0 + 4.0 * t);
        dataset.channel(Channel::mobility).values.push_back(0.3 + 0.01 * t);
        dataset.channel(Channel::vaccines).values.push_back(0.05 * t);
    }
    for (auto channel : all_channels) {
        dataset.channel(channel).first_week = 1;
    }

    std::vector<PointForecast> points;
    for (const auto target : forecast_targets) {
        const auto& series = dataset.channel(target);
        for (int horizon = 1; horizon <= 4; ++horizon) {
            for (int origin = series.first_week + horizon - 1;
                 origin <= series.last_week(); ++origin) {
                points.push_back(
                    { target, horizon, origin,
                      naive_forecast(series, origin, horizon).back() });
            }
        }
    }
    const auto report = build_report(build_quantile_series(points, dataset),
                                     dataset, "naive");
    bool exact = !report.cells.empty();
    for (const auto& cell : report.cells) {
        exact = exact && cell.mase == 1.0 && cell.scaled_wis == 1.0;
    }
    return { exact, false,
             format("%zu cells, all MASE and scaled WIS exactly 1",
                    report.cells.size()) };
}

// ---------------------------------------------------------------------
// 8. Zero physics weight reduces to the pure data loss bit-for-bit;
// weight decay strictly shrinks the trained parameter norm.

auto check_ablation_identity() -> Outcome
{
    Rng rng(31);
    const TrainingWindow window{ 1, 6 };
    bool bit_equal = true;
    for (int trial = 0; trial < 20; ++trial) {
        const auto dataset = random_dataset(rng, 6);
        const auto model = random_model(rng, dataset, window,
                                        static_cast<std::uint64_t>(trial));
        LossWeights weights;
        weights.w_ode = 0.0;
        weights.data[trial % channel_count] = 0.5 + rng.uniform();
        const auto collocation = collocation_points(window, 2);
        bit_equal = bit_equal
                    && total_loss(model, dataset, window, weights, collocation)
                           == data_loss(model, dataset, window, weights);
    }

    SyntheticOptions options;
    options.weeks = 8;
    const auto dataset =
        synthetic_dataset(default_synthetic_scenario(), options);
    TrainConfig plain;
    plain.epochs = 400;
    plain.l2_coefficient = 0.0;
    TrainConfig decayed = plain;
    decayed.l2_coefficient = 1e-3;
    const auto norm = [](const std::vector<double>& params) {
        double sum = 0.0;
        for (const double p : params) {
            sum += p * p;
        }
        return std::sqrt(sum);
    };
    const double free_norm = norm(
        train(dataset, { 1, 8 }, plain, LossWeights{}, 3).model.params);
    const double decayed_norm = norm(
        train(dataset, { 1, 8 }, decayed, LossWeights{}, 3).model.params);

    return { bit_equal && decayed_norm < free_norm, false,
             format("bit-equal on 20 trials, norm %.4f -> %.4f under decay",
                    free_norm, decayed_norm) };
}

// ---------------------------------------------------------------------
// 9. The raw fixture corpus reproduces the committed dataset exactly.

auto check_preprocessing_golden() -> Outcome
{
    const auto dataset =
        preprocess_directory(testutil::fixture_path("raw_corpus"));
    const auto dataset_ok =
        write_dataset_csv(dataset)
        == read_text_file(testutil::fixture_path("golden/dataset.csv"));
    const auto scaling_ok =
        write_scaling_csv(dataset.scaling)
        == read_text_file(
               testutil::fixture_path("golden/dataset.scaling.csv"));
    return { dataset_ok && scaling_ok, false,
             format("dataset %s, scaling %s",
                    dataset_ok ? "byte-exact" : "differs",
                    scaling_ok ? "byte-exact" : "differs") };
}

// ---------------------------------------------------------------------
// 10. Advisory full-data run; informational only, never gates.

auto check_full_data_run() -> Outcome
{
    const char* dir = std::getenv("EPIFORECAST_REAL_DATA_DIR");
    if (dir == nullptr) {
        return { true, true,
                 "set EPIFORECAST_REAL_DATA_DIR to a raw CSV directory to "
                 "enable this overnight run" };
    }
    const auto t0 = now();
    const auto dataset = preprocess_directory(dir);
    BacktestConfig config; // full defaults: 50,000 epochs, origins 17..89
    config.workers = 4;
    const auto result = rolling_backtest(dataset, config);
    const auto report = build_report(
        build_quantile_series(result.forecasts, dataset), dataset, "pinn");

    std::string text;
    for (const auto target : forecast_targets) {
        if (const auto* cell = report.find("pinn", target, 1)) {
            text += format("%s %.3f ",
                           std::string(channel_name(target)).c_str(),
                           cell->mase);
        }
    }
    const auto* cases = report.find("pinn", Channel::cases, 1);
    const auto* hosp = report.find("pinn", Channel::hosp, 1);
    const bool in_band =
        cases != nullptr && hosp != nullptr
        && std::abs(cases->mase - 0.75) <= 0.15
        && std::abs(hosp->mase - 0.58) <= 0.15;
    return { true, false,
             format("horizon-1 MASE %s%s advisory bands "
                    "(cases 0.75+-0.15, hosp 0.58+-0.15), %.0f s",
                    text.c_str(), in_band ? "inside" : "outside",
                    seconds_since(t0)) };
}

} // namespace

auto main() -> int
{
    struct Criterion
    {
        const char* description;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        { "parameter gradients match central finite differences",
          check_gradients },
        { "integrator trajectories satisfy the flow equations at fourth "
          "order",
          check_trajectory_residual },
        { "training recovers noise-free synthetic observables",
          check_synthetic_recovery },
        { "the rolling backtest beats the naive baseline at one week",
          check_synthetic_backtest },
        { "interval scores match hand formulas and an independent scorer",
          check_scoring_exactness },
        { "normal quantiles invert the oracle distribution function",
          check_normal_quantiles },
        { "the naive baseline scores exactly one against itself",
          check_naive_identity },
        { "zero physics weight reduces to the data loss; decay shrinks "
          "parameters",
          check_ablation_identity },
        { "the raw fixture corpus reproduces the committed dataset",
          check_preprocessing_golden },
        { "advisory full-data run", check_full_data_run },
    };

    int failed = 0;
    int skipped = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& error) {
            outcome = { false, false,
                        std::string("exception: ") + error.what() };
        }
        const char* tag = outcome.skipped ? "[SKIP]"
                          : outcome.pass  ? "[PASS]"
                                          : "[FAIL]";
        std::printf("%s %2zu. %s (%s)\n", tag, i + 1,
                    criteria[i].description, outcome.detail.c_str());
        std::fflush(stdout);
        failed += outcome.pass ? 0 : 1;
        skipped += outcome.skipped ? 1 : 0;
    }
    std::printf("acceptance: %zu passed, %d failed, %d skipped\n",
                criteria.size() - static_cast<std::size_t>(failed)
                    - static_cast<std::size_t>(skipped),
                failed, skipped);
    return failed > 0 ? 1 : 0;
}
