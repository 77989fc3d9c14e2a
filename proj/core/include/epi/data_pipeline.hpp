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

#include "epi/series.hpp"

#include <string>
#include <utility>

namespace epi {

enum class AggregateMode
{
    sum,
    mean,
};

// Reads a canonical `date,value` CSV.  Rows come back date-sorted; an
// empty value field is accepted only for the vaccine channel (kept as a
// missing marker for impute_vaccine).
auto load_csv(const std::string& path, Channel channel) -> RawSeries;

// Fills the vaccine series: leading missing values become 0, interior
// gaps are linearly interpolated between the nearest reported neighbors,
// trailing gaps extend the last reported value.
auto impute_vaccine(const RawSeries& series) -> RawSeries;

// Trailing 7-day mean; the first 6 days are dropped so every output day
// uses only past and current observations.
auto moving_average_7d(const RawSeries& series) -> RawSeries;

// Non-overlapping 7-day blocks anchored at the first date; a trailing
// partial block is dropped.  Counts aggregate by sum, levels by mean.
auto aggregate_weekly(const RawSeries& series, AggregateMode mode)
    -> WeeklySeries;

// Removes the first 20 weeks of the hospitalization series, keeping the
// original week indices of the survivors.
auto trim_hospitalizations(const WeeklySeries& series) -> WeeklySeries;

// Drops all weeks after `cutoff` from every channel; channels already
// ending earlier are untouched.
auto truncate_after_week(const Dataset& dataset, int cutoff = 110) -> Dataset;

// Per-channel min-max scaling computed on the full history and frozen:
// offset = min, scale = max - min (1 if the channel is constant).
auto normalize(const Dataset& dataset) -> std::pair<Dataset, ScalingSpec>;

// Runs the full preprocessing chain on the five raw daily channels:
// vaccine back-extension and imputation, 7-day smoothing, weekly
// aggregation on a shared anchor, hospitalization trim, week-110
// truncation, and normalization.
auto build_dataset(const RawSeries& cases,
                   const RawSeries& deaths,
                   const RawSeries& hospitalizations,
                   const RawSeries& mobility,
                   const RawSeries& vaccines,
                   int cutoff_week = 110) -> Dataset;

// Directory layout: <raw_dir>/{cases,deaths,hospitalizations,mobility,
// vaccines}.csv, each in the canonical `date,value` form.
auto preprocess_directory(const std::string& raw_dir, int cutoff_week = 110)
    -> Dataset;

// Canonical daily form: `date,value` rows, empty value for missing.
auto write_raw_csv(const RawSeries& series) -> std::string;

// Canonical dataset file: `week,cases,deaths,hosp,mobility,vaccines`
// with empty fields where a channel has no observation.  The sidecar
// scaling file is `channel,offset,scale`.
auto write_dataset_csv(const Dataset& dataset) -> std::string;
auto read_dataset_csv(const std::string& text) -> Dataset;
auto write_scaling_csv(const ScalingSpec& scaling) -> std::string;
auto read_scaling_csv(const std::string& text) -> ScalingSpec;

} // namespace epi
