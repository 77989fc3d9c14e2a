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

#include "epi/commands.hpp"
#include "epi/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

auto add_run_flags(CLI::App& cmd, epi::CliOptions& options) -> void
{
    cmd.add_option("--config", options.config_path,
                   "Run configuration file (key = value lines)");
    cmd.add_option("--seed", options.seed, "Base training seed");
    cmd.add_option("--epochs", options.epochs, "Training epochs per window");
    cmd.add_option("--w-ode", options.w_ode, "Physics loss weight");
    cmd.add_option("--l2", options.l2, "L2 regularization coefficient");
    cmd.add_option("--window-length", options.window_length,
                   "Trailing training window in weeks (0 = expanding)");
    cmd.add_option("--ablation", options.ablation,
                   "none keeps the physics loss, nn drops it")
        ->check(CLI::IsMember({ "none", "nn" }));
    cmd.add_option("--workers", options.workers,
                   "Parallel backtest windows");
    cmd.add_option("--out-dir", options.out_dir,
                   "Output directory (or EPIFORECAST_OUT_DIR)");
}

} // namespace

auto main(int argc, char** argv) -> int
{
    CLI::App app{ "Weekly epidemic forecasting with a physics-informed "
                  "neural network" };
    app.require_subcommand(1);
    epi::CliOptions options;

    std::string raw_dir;
    std::string dataset_path;
    std::string out_path;
    auto* preprocess = app.add_subcommand(
        "preprocess", "Build the canonical weekly dataset from raw CSVs");
    preprocess->add_option("raw_dir", raw_dir, "Directory of raw daily CSVs")
        ->required();
    preprocess->add_option("out_path", out_path, "Dataset CSV to write")
        ->required();
    add_run_flags(*preprocess, options);

    auto* backtest = app.add_subcommand(
        "backtest", "Train one model per origin week and score the forecasts");
    backtest->add_option("dataset", dataset_path, "Canonical dataset CSV")
        ->required();
    add_run_flags(*backtest, options);

    std::vector<std::string> forecast_files;
    std::string truth_path;
    auto* score = app.add_subcommand(
        "score", "Score forecast-hub CSV files against a truth dataset");
    score->add_option("forecasts", forecast_files, "Forecast-hub CSV files")
        ->required();
    score->add_option("--truth", truth_path, "Canonical dataset CSV")
        ->required();
    add_run_flags(*score, options);

    std::string forecasts_path;
    std::string quantiles_path;
    auto* plots = app.add_subcommand(
        "export-plots", "Emit tidy point and quantile-ribbon tables");
    plots->add_option("dataset", dataset_path, "Canonical dataset CSV")
        ->required();
    plots->add_option("forecasts", forecasts_path, "Backtest forecasts CSV")
        ->required();
    plots->add_option("quantiles", quantiles_path, "Forecast-hub CSV")
        ->required();
    add_run_flags(*plots, options);

    std::string adapt_kind;
    std::string adapt_in;
    std::string adapt_out;
    std::string region;
    std::string channel;
    auto* adapt = app.add_subcommand(
        "adapt", "Convert an upstream export to the canonical date,value form");
    adapt->add_option("kind", adapt_kind, "jhu | hhs | mobility")->required();
    adapt->add_option("input", adapt_in, "Upstream CSV")->required();
    adapt->add_option("output", adapt_out, "Canonical CSV to write")
        ->required();
    adapt->add_option("--region", region, "State or sub-region filter");
    adapt->add_option("--channel", channel, "cases or deaths (jhu only)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (preprocess->parsed()) {
            return epi::cmd_preprocess(raw_dir, out_path,
                                       epi::resolve_config(options));
        }
        if (backtest->parsed()) {
            return epi::cmd_backtest(dataset_path,
                                     epi::resolve_config(options));
        }
        if (score->parsed()) {
            return epi::cmd_score(forecast_files, truth_path,
                                  epi::resolve_config(options));
        }
        if (plots->parsed()) {
            return epi::cmd_export_plots(dataset_path, forecasts_path,
                                         quantiles_path,
                                         epi::resolve_config(options));
        }
        if (adapt->parsed()) {
            return epi::cmd_adapt(adapt_kind, adapt_in, adapt_out, region,
                                  channel);
        }
    } catch (const epi::Error& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 1;
}
