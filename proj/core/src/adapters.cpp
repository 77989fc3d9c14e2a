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

#include "epi/adapters.hpp"

#include "epi/dates.hpp"
#include "epi/errors.hpp"

#include <algorithm>
#include <map>

namespace epi {

namespace {

auto require_column(const CsvTable& table, const std::string& name) -> int
{
    const auto index = table.column_index(name);
    if (!index) {
        throw ParseError("missing column '" + name + "'");
    }
    return *index;
}

auto sorted_series(std::map<int, double>&& by_day, std::string name)
    -> RawSeries
{
    if (by_day.empty()) {
        throw ParseError("adapter produced no rows");
    }
    RawSeries series;
    series.name = std::move(name);
    for (const auto& [day, value] : by_day) {
        series.days.push_back(day);
        series.values.push_back(value);
    }
    return series;
}

} // namespace

auto adapt_jhu_cumulative(const CsvTable& table,
                          const std::string& province_state,
                          Channel channel) -> RawSeries
{
    const int state_col = require_column(table, "Province_State");
    // Date columns start after the last metadata column; identify them by
    // a parseable M/D/YY header.
    std::vector<std::pair<int, int>> date_cols; // (column, day number)
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (const auto date = parse_date_mdy(table.header[c])) {
            date_cols.emplace_back(static_cast<int>(c), day_number(*date));
        }
    }
    if (date_cols.empty()) {
        throw ParseError("no date columns in JHU table");
    }
    std::map<int, double> cumulative;
    bool matched = false;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row[static_cast<std::size_t>(state_col)] != province_state) {
            continue;
        }
        matched = true;
        for (const auto& [col, day] : date_cols) {
            cumulative[day] += parse_double(row[static_cast<std::size_t>(col)],
                                            table.row_lines[r]);
        }
    }
    if (!matched) {
        throw ParseError("no rows match Province_State '" + province_state
                         + "'");
    }
    RawSeries series;
    series.name = std::string(channel_name(channel));
    double previous = 0.0;
    bool have_previous = false;
    for (const auto& [day, total] : cumulative) {
        if (have_previous) {
            series.days.push_back(day);
            series.values.push_back(std::max(0.0, total - previous));
        }
        previous = total;
        have_previous = true;
    }
    if (series.days.empty()) {
        throw ParseError("JHU table needs at least two date columns");
    }
    return series;
}

auto adapt_hhs_admissions(const CsvTable& table) -> RawSeries
{
    const int date_col = require_column(table, "date");
    const int adult_col = require_column(
        table, "previous_day_admission_adult_covid_confirmed");
    const int pediatric_col = require_column(
        table, "previous_day_admission_pediatric_covid_confirmed");
    std::map<int, double> by_day;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        const auto date = parse_date(row[static_cast<std::size_t>(date_col)]);
        if (!date) {
            throw ParseError("invalid date '"
                                 + row[static_cast<std::size_t>(date_col)]
                                 + "'",
                             line);
        }
        const double adult =
            parse_double(row[static_cast<std::size_t>(adult_col)], line);
        const double pediatric =
            parse_double(row[static_cast<std::size_t>(pediatric_col)], line);
        by_day[day_number(*date)] += adult + pediatric;
    }
    return sorted_series(std::move(by_day),
                         std::string(channel_name(Channel::hosp)));
}

auto adapt_google_mobility(const CsvTable& table,
                           const std::string& sub_region_1) -> RawSeries
{
    const int date_col = require_column(table, "date");
    const int region1_col = require_column(table, "sub_region_1");
    const int region2_col = require_column(table, "sub_region_2");
    const int value_col =
        require_column(table, "residential_percent_change_from_baseline");
    std::map<int, double> by_day;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        if (row[static_cast<std::size_t>(region1_col)] != sub_region_1
            || !row[static_cast<std::size_t>(region2_col)].empty()) {
            continue;
        }
        const auto date = parse_date(row[static_cast<std::size_t>(date_col)]);
        if (!date) {
            throw ParseError("invalid date '"
                                 + row[static_cast<std::size_t>(date_col)]
                                 + "'",
                             line);
        }
        by_day[day_number(*date)] =
            parse_double(row[static_cast<std::size_t>(value_col)], line);
    }
    return sorted_series(std::move(by_day),
                         std::string(channel_name(Channel::mobility)));
}

} // namespace epi
