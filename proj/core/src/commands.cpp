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

#include "epi/adapters.hpp"
#include "epi/csv.hpp"
#include "epi/data_pipeline.hpp"
#include "epi/errors.hpp"
#include "epi/quantiles.hpp"
#include "epi/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <tuple>

namespace epi {

namespace {

auto utc_timestamp() -> std::string
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

// Replaces the final extension, so "data/set.csv" pairs with
// "data/set.scaling.csv".
auto sibling_path(const std::string& path, const char* suffix) -> std::string
{
    std::filesystem::path p(path);
    p.replace_extension();
    return p.string() + suffix;
}

auto make_manifest(const RunConfig& config, const Dataset& dataset)
    -> RunManifest
{
    RunManifest manifest;
    manifest.timestamp = utc_timestamp();
    manifest.config_digest = content_digest(write_run_config(config));
    manifest.seed = config.backtest.train.seed;
    manifest.dataset_first_week = 1;
    manifest.dataset_last_week = dataset.last_week();
    return manifest;
}

// Writes one artifact, records it in the manifest, and reports it.
auto emit(RunManifest& manifest,
          const std::string& path,
          const std::string& text) -> void
{
    write_text_file(path, text);
    manifest.outputs.emplace_back(path, content_digest(text));
    std::cout << "wrote " << path << '\n';
}

auto finish(RunManifest& manifest, const std::string& path) -> void
{
    write_text_file(path, write_manifest(manifest));
    std::cout << "wrote " << path << '\n';
}

auto clamp_origins(const BacktestConfig& config, const Dataset& dataset)
    -> BacktestConfig
{
    BacktestConfig clamped = config;
    int max_horizon = 1;
    for (const int h : clamped.horizons) {
        max_horizon = std::max(max_horizon, h);
    }
    const int last_truth = dataset.channel(Channel::cases).last_week();
    clamped.last_origin = std::min(clamped.last_origin,
                                   last_truth - max_horizon);
    clamped.first_origin =
        std::max(4, std::min(clamped.first_origin, clamped.last_origin));
    if (clamped.last_origin < clamped.first_origin) {
        throw InvalidArgument("dataset too short for any backtest origin");
    }
    return clamped;
}

} // namespace

auto resolve_config(const CliOptions& options) -> RunConfig
{
    RunConfig config;
    if (!options.config_path.empty()) {
        config = parse_run_config(read_text_file(options.config_path));
    }
    if (config.out_dir == RunConfig{}.out_dir) {
        if (const char* env = std::getenv("EPIFORECAST_OUT_DIR")) {
            config.out_dir = env;
        }
    }
    if (options.seed) {
        config.backtest.train.seed = *options.seed;
    }
    if (options.epochs) {
        config.backtest.train.epochs = *options.epochs;
    }
    if (options.w_ode) {
        config.backtest.weights.w_ode = *options.w_ode;
    }
    if (options.l2) {
        config.backtest.train.l2_coefficient = *options.l2;
    }
    if (options.window_length) {
        config.backtest.window_length = *options.window_length;
    }
    if (options.workers) {
        config.backtest.workers = *options.workers;
    }
    if (!options.out_dir.empty()) {
        config.out_dir = options.out_dir;
    }
    if (options.ablation == "nn") {
        config.backtest.weights.w_ode = 0.0;
    } else if (options.ablation != "none") {
        throw InvalidArgument("unknown ablation '" + options.ablation + "'");
    }
    return config;
}

auto content_digest(std::string_view text) -> std::string
{
    // FNV-1a, 64 bit.
    std::uint64_t hash = 14695981039346656037ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(hash));
    return buffer;
}

auto write_manifest(const RunManifest& manifest) -> std::string
{
    std::ostringstream out;
    out << "tool: " << manifest.tool << '\n'
        << "timestamp: " << manifest.timestamp << '\n'
        << "config_digest: " << manifest.config_digest << '\n'
        << "seed: " << manifest.seed << '\n'
        << "dataset_weeks: " << manifest.dataset_first_week << ".."
        << manifest.dataset_last_week << '\n'
        << "warnings: " << manifest.warnings << '\n';
    for (const auto& [file, digest] : manifest.outputs) {
        out << "output: " << file << ' ' << digest << '\n';
    }
    return out.str();
}

auto load_dataset_files(const std::string& dataset_path) -> Dataset
{
    auto dataset = read_dataset_csv(read_text_file(dataset_path));
    dataset.scaling =
        read_scaling_csv(read_text_file(sibling_path(dataset_path,
                                                     ".scaling.csv")));
    return dataset;
}

auto cmd_preprocess(const std::string& raw_dir,
                    const std::string& out_path,
                    const RunConfig& config) -> int
{
    const auto dataset = preprocess_directory(raw_dir);
    auto manifest = make_manifest(config, dataset);
    const auto parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    emit(manifest, out_path, write_dataset_csv(dataset));
    emit(manifest, sibling_path(out_path, ".scaling.csv"),
         write_scaling_csv(dataset.scaling));
    finish(manifest, sibling_path(out_path, ".manifest.txt"));
    std::cout << "weeks retained: 1.." << dataset.last_week() << '\n';
    for (const auto channel : all_channels) {
        const auto& series = dataset.channel(channel);
        std::cout << "  " << channel_name(channel) << ": weeks "
                  << series.first_week << ".." << series.last_week() << '\n';
    }
    return 0;
}

auto cmd_backtest(const std::string& dataset_path, const RunConfig& config)
    -> int
{
    const auto dataset = load_dataset_files(dataset_path);
    RunConfig run = config;
    run.backtest = clamp_origins(config.backtest, dataset);
    std::cout << "backtest origins " << run.backtest.first_origin << ".."
              << run.backtest.last_origin << ", "
              << run.backtest.train.epochs << " epochs, "
              << run.backtest.workers << " worker(s)\n";

    const auto result = rolling_backtest(dataset, run.backtest);
    const auto quantiles = build_quantile_series(result.forecasts, dataset);
    const auto report = build_report(quantiles, dataset, "pinn");

    auto manifest = make_manifest(run, dataset);
    for (const auto& window : result.windows) {
        if (!window.converged) {
            ++manifest.warnings;
            std::cout << "warning: origin week " << window.origin_week
                      << " skipped after " << window.attempts
                      << " attempts\n";
        }
    }
    std::filesystem::create_directories(run.out_dir);
    const auto in_dir = [&](const char* name) {
        return (std::filesystem::path(run.out_dir) / name).string();
    };
    emit(manifest, in_dir("forecasts.csv"), write_backtest_csv(result));
    emit(manifest, in_dir("quantiles.csv"),
         write_hub_csv(quantiles, run.week1_end));
    emit(manifest, in_dir("report.csv"), write_report_csv(report));
    finish(manifest, in_dir("manifest.txt"));
    std::cout << format_report_table(report);
    if (manifest.warnings > 0) {
        std::cout << manifest.warnings << " window(s) skipped\n";
    }
    return 0;
}

auto cmd_score(const std::vector<std::string>& forecast_files,
               const std::string& truth_path,
               const RunConfig& config) -> int
{
    const auto dataset = load_dataset_files(truth_path);
    ScoreReport combined;
    for (const auto& file : forecast_files) {
        const auto forecasts =
            read_hub_csv(read_text_file(file), config.week1_end);
        const auto method = std::filesystem::path(file).stem().string();
        const auto report = build_report(forecasts, dataset, method);
        combined.cells.insert(combined.cells.end(), report.cells.begin(),
                              report.cells.end());
    }
    auto manifest = make_manifest(config, dataset);
    std::filesystem::create_directories(config.out_dir);
    const auto report_path =
        (std::filesystem::path(config.out_dir) / "report.csv").string();
    emit(manifest, report_path, write_report_csv(combined));
    finish(manifest,
           (std::filesystem::path(config.out_dir) / "manifest.txt").string());
    std::cout << format_report_table(combined);
    return 0;
}

auto cmd_export_plots(const std::string& dataset_path,
                      const std::string& forecasts_path,
                      const std::string& quantiles_path,
                      const RunConfig& config) -> int
{
    const auto dataset = load_dataset_files(dataset_path);
    auto backtest = read_backtest_csv(read_text_file(forecasts_path));
    const auto quantiles =
        read_hub_csv(read_text_file(quantiles_path), config.week1_end);

    const auto channel_order = [](Channel target) {
        for (std::size_t i = 0; i < forecast_targets.size(); ++i) {
            if (forecast_targets[i] == target) {
                return static_cast<int>(i);
            }
        }
        return static_cast<int>(forecast_targets.size());
    };
    std::stable_sort(backtest.forecasts.begin(), backtest.forecasts.end(),
                     [&](const PointForecast& a, const PointForecast& b) {
                         return std::tuple(channel_order(a.target), a.horizon,
                                           a.target_week())
                                < std::tuple(channel_order(b.target),
                                             b.horizon, b.target_week());
                     });

    const auto truth_field = [&](Channel target, int week) -> std::string {
        const auto& series = dataset.channel(target);
        if (!series.has_week(week)) {
            return {};
        }
        return format_double(
            dataset.scaling.denormalize(target, series.at_week(week)));
    };

    std::ostringstream points;
    points << "target,horizon,week,truth,forecast\n";
    for (const auto& forecast : backtest.forecasts) {
        points << channel_name(forecast.target) << ',' << forecast.horizon
               << ',' << forecast.target_week() << ','
               << truth_field(forecast.target, forecast.target_week()) << ','
               << format_double(forecast.value) << '\n';
    }

    std::ostringstream ribbons;
    ribbons << "target,horizon,origin_week,week,truth";
    for (const double level : quantile_levels) {
        ribbons << ",q" << format_double(level);
    }
    ribbons << '\n';
    for (const auto& forecast : quantiles) {
        ribbons << channel_name(forecast.target) << ',' << forecast.horizon
                << ',' << forecast.origin_week << ',' << forecast.target_week()
                << ',' << truth_field(forecast.target, forecast.target_week());
        for (const double value : forecast.values) {
            ribbons << ',' << format_double(value);
        }
        ribbons << '\n';
    }

    auto manifest = make_manifest(config, dataset);
    std::filesystem::create_directories(config.out_dir);
    const auto in_dir = [&](const char* name) {
        return (std::filesystem::path(config.out_dir) / name).string();
    };
    emit(manifest, in_dir("points.csv"), points.str());
    emit(manifest, in_dir("ribbons.csv"), ribbons.str());
    finish(manifest, in_dir("manifest.txt"));
    return 0;
}

auto cmd_adapt(const std::string& kind,
               const std::string& in_path,
               const std::string& out_path,
               const std::string& region,
               const std::string& channel) -> int
{
    const auto table = read_csv_file(in_path);
    RawSeries series;
    if (kind == "jhu") {
        const auto parsed = channel_from_name(channel);
        if (!parsed || !is_count_channel(*parsed)) {
            throw InvalidArgument("jhu adapter needs --channel cases|deaths");
        }
        if (region.empty()) {
            throw InvalidArgument("jhu adapter needs --region");
        }
        series = adapt_jhu_cumulative(table, region, *parsed);
    } else if (kind == "hhs") {
        series = adapt_hhs_admissions(table);
    } else if (kind == "mobility") {
        if (region.empty()) {
            throw InvalidArgument("mobility adapter needs --region");
        }
        series = adapt_google_mobility(table, region);
    } else {
        throw InvalidArgument("unknown adapter '" + kind + "'");
    }
    const auto parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
    write_text_file(out_path, write_raw_csv(series));
    std::cout << "wrote " << series.size() << " days to " << out_path << '\n';
    return 0;
}

} // namespace epi
