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

#include "epi/run_config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epi {

// Command-line overrides; anything unset falls back to the config file,
// which falls back to built-in defaults.
struct CliOptions
{
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<long long> epochs;
    std::optional<double> w_ode;
    std::optional<double> l2;
    std::optional<int> window_length;
    std::optional<int> workers;
    std::string ablation = "none"; // none | nn
};

// Precedence: flags > config file > defaults; the EPIFORECAST_OUT_DIR
// environment variable supplies out_dir when nothing else does.  The
// "nn" ablation zeroes the physics weight.
auto resolve_config(const CliOptions& options) -> RunConfig;

// Provenance record written once per run; the timestamp is the only
// field that varies between identical reruns.
struct RunManifest
{
    std::string tool = "epiforecast 0.1.0";
    std::string timestamp;
    std::string config_digest;
    std::uint64_t seed = 0;
    int dataset_first_week = 0;
    int dataset_last_week = 0;
    int warnings = 0;
    std::vector<std::pair<std::string, std::string>> outputs; // file, digest
};

auto content_digest(std::string_view text) -> std::string;
auto write_manifest(const RunManifest& manifest) -> std::string;

// Reads the canonical dataset CSV plus its scaling sidecar
// (<stem>.scaling.csv next to the dataset file).
auto load_dataset_files(const std::string& dataset_path) -> Dataset;

auto cmd_preprocess(const std::string& raw_dir,
                    const std::string& out_path,
                    const RunConfig& config) -> int;

auto cmd_backtest(const std::string& dataset_path, const RunConfig& config)
    -> int;

auto cmd_score(const std::vector<std::string>& forecast_files,
               const std::string& truth_path,
               const RunConfig& config) -> int;

auto cmd_export_plots(const std::string& dataset_path,
                      const std::string& forecasts_path,
                      const std::string& quantiles_path,
                      const RunConfig& config) -> int;

// Converts one upstream export (jhu | hhs | mobility) to the canonical
// date,value form.
auto cmd_adapt(const std::string& kind,
               const std::string& in_path,
               const std::string& out_path,
               const std::string& region,
               const std::string& channel) -> int;

} // namespace epi
