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

#include "epi/data_pipeline.hpp"

#include "epi/csv.hpp"
#include "epi/dates.hpp"
#include "epi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace epi {

auto channel_name(Channel channel) -> std::string_view
{
    switch (channel) {
    case Channel::cases: return "cases";
    case Channel::deaths: return "deaths";
    case Channel::hosp: return "hosp";
    case Channel::mobility: return "mobility";
    case Channel::vaccines: return "vaccines";
    }
    return "?";
}

auto channel_from_name(std::string_view name) -> std::optional<Channel>
{
    for (const auto channel : all_channels) {
        if (channel_name(channel) == name) {
            return channel;
        }
    }
    return std::nullopt;
}

auto is_count_channel(Channel channel) -> bool
{
    return channel == Channel::cases || channel == Channel::deaths
           || channel == Channel::hosp;
}

auto Dataset::last_week() const -> int
{
    int last = 0;
    for (const auto& series : channels) {
        last = std::max(last, series.last_week());
    }
    return last;
}

namespace {

// Inserts missing markers so the day grid is contiguous.
auto expand_daily(const RawSeries& series) -> RawSeries
{
    RawSeries out;
    out.name = series.name;
    if (series.days.empty()) {
        return out;
    }
    const int first = series.days.front();
    const int last = series.days.back();
    out.days.resize(static_cast<std::size_t>(last - first + 1));
    std::iota(out.days.begin(), out.days.end(), first);
    out.values.assign(out.days.size(), missing_value);
    for (std::size_t i = 0; i < series.days.size(); ++i) {
        out.values[static_cast<std::size_t>(series.days[i] - first)] =
            series.values[i];
    }
    return out;
}

auto require_daily(const RawSeries& series, const char* op) -> void
{
    for (std::size_t i = 1; i < series.days.size(); ++i) {
        if (series.days[i] != series.days[i - 1] + 1) {
            throw InvalidArgument(std::string(op)
                                  + ": day grid has gaps near "
                                  + format_date(date_from_day_number(
                                      series.days[i - 1])));
        }
    }
}

auto require_complete(const RawSeries& series) -> void
{
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (is_missing(series.values[i])) {
            throw InvalidArgument(
                "channel '" + series.name + "' has a missing value at "
                + format_date(date_from_day_number(series.days[i])));
        }
    }
}

// Keeps the sub-range of days [day_lo, day_hi] of a contiguous series.
auto slice_daily(const RawSeries& series, int day_lo, int day_hi) -> RawSeries
{
    RawSeries out;
    out.name = series.name;
    const int first = series.days.front();
    const auto lo = static_cast<std::size_t>(day_lo - first);
    const auto hi = static_cast<std::size_t>(day_hi - first);
    out.days.assign(series.days.begin() + static_cast<std::ptrdiff_t>(lo),
                    series.days.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    out.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(lo),
                      series.values.begin()
                          + static_cast<std::ptrdiff_t>(hi + 1));
    return out;
}

} // namespace

auto load_csv(const std::string& path, Channel channel) -> RawSeries
{
    const auto table = read_csv_file(path);
    if (table.header != std::vector<std::string>{ "date", "value" }) {
        throw ParseError("expected header 'date,value' in " + path);
    }
    RawSeries series;
    series.name = std::string(channel_name(channel));
    std::vector<std::pair<int, double>> rows;
    rows.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const int line = table.row_lines[i];
        if (row.size() != 2) {
            throw ParseError("expected 2 fields", line);
        }
        const auto date = parse_date(row[0]);
        if (!date) {
            throw ParseError("invalid date '" + row[0] + "'", line);
        }
        double value = missing_value;
        if (row[1].empty()) {
            if (channel != Channel::vaccines) {
                throw ParseError("missing value not allowed for channel '"
                                     + series.name + "'",
                                 line);
            }
        } else {
            value = parse_double(row[1], line);
        }
        rows.emplace_back(day_number(*date), value);
    }
    if (rows.empty()) {
        throw ParseError("no data rows in " + path);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.first < b.first;
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first) {
            throw ParseError("duplicate date "
                             + format_date(date_from_day_number(rows[i].first))
                             + " in " + path);
        }
    }
    for (const auto& [day, value] : rows) {
        series.days.push_back(day);
        series.values.push_back(value);
    }
    return series;
}

auto impute_vaccine(const RawSeries& series) -> RawSeries
{
    auto out = expand_daily(series);
    const auto n = out.size();
    std::size_t first_reported = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_missing(out.values[i])) {
            first_reported = i;
            break;
        }
    }
    if (first_reported == n) {
        throw InvalidArgument("vaccine series has no reported values");
    }
    for (std::size_t i = 0; i < first_reported; ++i) {
        out.values[i] = 0.0;
    }
    std::size_t prev = first_reported;
    for (std::size_t i = first_reported + 1; i < n; ++i) {
        if (is_missing(out.values[i])) {
            continue;
        }
        if (i > prev + 1) {
            const double lo = out.values[prev];
            const double hi = out.values[i];
            const double span = static_cast<double>(i - prev);
            for (std::size_t j = prev + 1; j < i; ++j) {
                out.values[j] =
                    lo + (hi - lo) * static_cast<double>(j - prev) / span;
            }
        }
        prev = i;
    }
    for (std::size_t i = prev + 1; i < n; ++i) {
        out.values[i] = out.values[prev];
    }
    return out;
}

auto moving_average_7d(const RawSeries& series) -> RawSeries
{
    if (series.size() < 7) {
        throw InvalidArgument("moving_average_7d: series shorter than 7 days");
    }
    require_daily(series, "moving_average_7d");
    require_complete(series);
    RawSeries out;
    out.name = series.name;
    double window_sum =
        std::accumulate(series.values.begin(), series.values.begin() + 6, 0.0);
    for (std::size_t i = 6; i < series.size(); ++i) {
        window_sum += series.values[i];
        out.days.push_back(series.days[i]);
        out.values.push_back(window_sum / 7.0);
        window_sum -= series.values[i - 6];
    }
    return out;
}

auto aggregate_weekly(const RawSeries& series, AggregateMode mode)
    -> WeeklySeries
{
    if (series.size() < 7) {
        throw InvalidArgument("aggregate_weekly: series shorter than 7 days");
    }
    require_daily(series, "aggregate_weekly");
    require_complete(series);
    WeeklySeries out;
    const std::size_t weeks = series.size() / 7;
    out.values.reserve(weeks);
    for (std::size_t w = 0; w < weeks; ++w) {
        double sum = 0.0;
        for (std::size_t d = 0; d < 7; ++d) {
            sum += series.values[7 * w + d];
        }
        out.values.push_back(mode == AggregateMode::sum ? sum : sum / 7.0);
    }
    return out;
}

auto trim_hospitalizations(const WeeklySeries& series) -> WeeklySeries
{
    if (series.size() <= 20) {
        throw InvalidArgument(
            "trim_hospitalizations: need more than 20 weeks, got "
            + std::to_string(series.size()));
    }
    WeeklySeries out;
    out.first_week = series.first_week + 20;
    out.values.assign(series.values.begin() + 20, series.values.end());
    return out;
}

auto truncate_after_week(const Dataset& dataset, int cutoff) -> Dataset
{
    if (cutoff < 1) {
        throw InvalidArgument("truncate_after_week: cutoff must be >= 1");
    }
    Dataset out = dataset;
    for (auto& series : out.channels) {
        if (series.first_week > cutoff) {
            series.values.clear();
        } else if (series.last_week() > cutoff) {
            series.values.resize(
                static_cast<std::size_t>(cutoff - series.first_week + 1));
        }
    }
    return out;
}

auto normalize(const Dataset& dataset) -> std::pair<Dataset, ScalingSpec>
{
    ScalingSpec spec;
    Dataset out = dataset;
    for (const auto channel : all_channels) {
        const auto i = static_cast<std::size_t>(channel);
        auto& series = out.channels[i];
        if (series.values.empty()) {
            throw InvalidArgument("normalize: channel '"
                                  + std::string(channel_name(channel))
                                  + "' is empty");
        }
        const auto [lo, hi] =
            std::minmax_element(series.values.begin(), series.values.end());
        spec.offset[i] = *lo;
        spec.scale[i] = (*hi > *lo) ? (*hi - *lo) : 1.0;
        for (auto& value : series.values) {
            value = (value - spec.offset[i]) / spec.scale[i];
        }
    }
    out.scaling = spec;
    return { out, spec };
}

auto build_dataset(const RawSeries& cases,
                   const RawSeries& deaths,
                   const RawSeries& hospitalizations,
                   const RawSeries& mobility,
                   const RawSeries& vaccines,
                   int cutoff_week) -> Dataset
{
    auto daily_cases = expand_daily(cases);
    auto daily_deaths = expand_daily(deaths);
    auto daily_hosp = expand_daily(hospitalizations);
    auto daily_mobility = expand_daily(mobility);
    require_complete(daily_cases);
    require_complete(daily_deaths);
    require_complete(daily_hosp);
    require_complete(daily_mobility);

    // Vaccines begin long after the other channels; back-fill the grid to
    // the earliest anchor candidate so imputation can zero the lead-in.
    const int anchor_candidate = std::min(
        { daily_cases.days.front(), daily_deaths.days.front(),
          daily_mobility.days.front() });
    RawSeries vaccine_grid = vaccines;
    if (!vaccine_grid.days.empty()
        && vaccine_grid.days.front() > anchor_candidate) {
        RawSeries extended;
        extended.name = vaccine_grid.name;
        extended.days.push_back(anchor_candidate);
        extended.values.push_back(missing_value);
        extended.days.insert(extended.days.end(), vaccine_grid.days.begin(),
                             vaccine_grid.days.end());
        extended.values.insert(extended.values.end(),
                               vaccine_grid.values.begin(),
                               vaccine_grid.values.end());
        vaccine_grid = std::move(extended);
    }
    auto daily_vaccines = impute_vaccine(vaccine_grid);

    daily_cases = moving_average_7d(daily_cases);
    daily_deaths = moving_average_7d(daily_deaths);
    daily_hosp = moving_average_7d(daily_hosp);
    daily_mobility = moving_average_7d(daily_mobility);
    daily_vaccines = moving_average_7d(daily_vaccines);

    // Week 1 starts where every always-on channel has smoothed data; the
    // common end is the last day all five channels still report.
    const int anchor = std::max({ daily_cases.days.front(),
                                  daily_deaths.days.front(),
                                  daily_mobility.days.front(),
                                  daily_vaccines.days.front() });
    const int end_day = std::min(
        { daily_cases.days.back(), daily_deaths.days.back(),
          daily_hosp.days.back(), daily_mobility.days.back(),
          daily_vaccines.days.back() });
    const int weeks = (end_day - anchor + 1) / 7;
    if (weeks < 1) {
        throw InvalidArgument("build_dataset: no full week of overlap");
    }
    const int last_day = anchor + 7 * weeks - 1;

    const auto weekly = [&](const RawSeries& daily, AggregateMode mode) {
        return aggregate_weekly(slice_daily(daily, anchor, last_day), mode);
    };

    Dataset dataset;
    dataset.channel(Channel::cases) = weekly(daily_cases, AggregateMode::sum);
    dataset.channel(Channel::deaths) = weekly(daily_deaths, AggregateMode::sum);
    dataset.channel(Channel::mobility) =
        weekly(daily_mobility, AggregateMode::mean);
    dataset.channel(Channel::vaccines) =
        weekly(daily_vaccines, AggregateMode::mean);

    // Hospitalizations join at the first week block they fully cover.
    int hosp_week = 1;
    while (anchor + 7 * (hosp_week - 1) < daily_hosp.days.front()) {
        ++hosp_week;
    }
    const int hosp_start = anchor + 7 * (hosp_week - 1);
    if (hosp_start + 6 > last_day) {
        throw InvalidArgument(
            "build_dataset: hospitalizations cover no full week");
    }
    auto weekly_hosp = aggregate_weekly(
        slice_daily(daily_hosp, hosp_start, last_day), AggregateMode::sum);
    weekly_hosp.first_week = hosp_week;
    dataset.channel(Channel::hosp) = trim_hospitalizations(weekly_hosp);

    dataset = truncate_after_week(dataset, cutoff_week);
    return normalize(dataset).first;
}

auto preprocess_directory(const std::string& raw_dir, int cutoff_week)
    -> Dataset
{
    const auto file = [&](Channel channel, const char* stem) {
        return load_csv(raw_dir + "/" + stem + ".csv", channel);
    };
    // Load in channel order so a missing file is reported deterministically.
    auto cases = file(Channel::cases, "cases");
    auto deaths = file(Channel::deaths, "deaths");
    auto hosp = file(Channel::hosp, "hospitalizations");
    auto mobility = file(Channel::mobility, "mobility");
    auto vaccines = file(Channel::vaccines, "vaccines");
    return build_dataset(cases, deaths, hosp, mobility, vaccines, cutoff_week);
}

auto write_raw_csv(const RawSeries& series) -> std::string
{
    std::ostringstream out;
    out << "date,value\n";
    for (std::size_t i = 0; i < series.days.size(); ++i) {
        out << format_date(date_from_day_number(series.days[i])) << ',';
        if (!std::isnan(series.values[i])) {
            out << format_double(series.values[i]);
        }
        out << '\n';
    }
    return out.str();
}

auto write_dataset_csv(const Dataset& dataset) -> std::string
{
    std::ostringstream out;
    out << "week,cases,deaths,hosp,mobility,vaccines\n";
    for (int week = 1; week <= dataset.last_week(); ++week) {
        out << week;
        for (const auto channel : all_channels) {
            const auto& series = dataset.channel(channel);
            out << ',';
            if (series.has_week(week)) {
                out << format_double(series.at_week(week));
            }
        }
        out << '\n';
    }
    return out.str();
}

auto read_dataset_csv(const std::string& text) -> Dataset
{
    const auto table = parse_csv(text);
    const std::vector<std::string> expected{ "week",     "cases", "deaths",
                                             "hosp",     "mobility",
                                             "vaccines" };
    if (table.header != expected) {
        throw ParseError("unexpected dataset header");
    }
    Dataset dataset;
    std::array<bool, channel_count> started{};
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        if (row.size() != 6) {
            throw ParseError("expected 6 fields", line);
        }
        const auto week = static_cast<int>(parse_long(row[0], line));
        if (week != static_cast<int>(r) + 1) {
            throw ParseError("week indices must be contiguous from 1", line);
        }
        for (const auto channel : all_channels) {
            const auto i = static_cast<std::size_t>(channel);
            const auto& field = row[i + 1];
            auto& series = dataset.channels[i];
            if (field.empty()) {
                if (started[i]) {
                    throw ParseError("gap inside channel '"
                                         + std::string(channel_name(channel))
                                         + "'",
                                     line);
                }
                continue;
            }
            if (!started[i]) {
                started[i] = true;
                series.first_week = week;
            }
            series.values.push_back(parse_double(field, line));
        }
    }
    return dataset;
}

auto write_scaling_csv(const ScalingSpec& scaling) -> std::string
{
    std::ostringstream out;
    out << "channel,offset,scale\n";
    for (const auto channel : all_channels) {
        const auto i = static_cast<std::size_t>(channel);
        out << channel_name(channel) << ',' << format_double(scaling.offset[i])
            << ',' << format_double(scaling.scale[i]) << '\n';
    }
    return out.str();
}

auto read_scaling_csv(const std::string& text) -> ScalingSpec
{
    const auto table = parse_csv(text);
    if (table.header != std::vector<std::string>{ "channel", "offset",
                                                  "scale" }) {
        throw ParseError("unexpected scaling header");
    }
    ScalingSpec spec;
    std::array<bool, channel_count> seen{};
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        if (row.size() != 3) {
            throw ParseError("expected 3 fields", line);
        }
        const auto channel = channel_from_name(row[0]);
        if (!channel) {
            throw ParseError("unknown channel '" + row[0] + "'", line);
        }
        const auto i = static_cast<std::size_t>(*channel);
        seen[i] = true;
        spec.offset[i] = parse_double(row[1], line);
        spec.scale[i] = parse_double(row[2], line);
        if (spec.scale[i] <= 0) {
            throw ParseError("scale must be positive", line);
        }
    }
    for (std::size_t i = 0; i < channel_count; ++i) {
        if (!seen[i]) {
            throw ParseError("scaling file is missing a channel row");
        }
    }
    return spec;
}

} // namespace epi
