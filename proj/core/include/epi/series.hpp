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

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epi {

// Channel order is fixed; it is also the column order of the canonical
// dataset CSV and the output order of the observable map.
enum class Channel : int
{
    cases = 0,
    deaths = 1,
    hosp = 2,
    mobility = 3,
    vaccines = 4,
};

inline constexpr int channel_count = 5;

inline constexpr std::array<Channel, channel_count> all_channels{
    Channel::cases,    Channel::deaths,   Channel::hosp,
    Channel::mobility, Channel::vaccines,
};

auto channel_name(Channel channel) -> std::string_view;
auto channel_from_name(std::string_view name) -> std::optional<Channel>;

// True for channels whose weekly value is a total of daily counts;
// mobility and vaccines are levels and aggregate by mean instead.
auto is_count_channel(Channel channel) -> bool;

// Daily observations on a calendar grid.  Missing values are quiet NaN;
// only the vaccine channel may carry them past ingestion.
struct RawSeries
{
    std::string name;
    std::vector<int> days; // day numbers, strictly increasing
    std::vector<double> values;

    [[nodiscard]] auto size() const -> std::size_t { return values.size(); }
};

inline auto is_missing(double value) -> bool
{
    return std::isnan(value);
}

inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();

// Weekly values on the shared dataset week axis.  first_week is 1-based;
// a channel that joins late (hospitalizations) has first_week > 1.
struct WeeklySeries
{
    int first_week = 1;
    std::vector<double> values;

    [[nodiscard]] auto size() const -> int
    {
        return static_cast<int>(values.size());
    }
    [[nodiscard]] auto last_week() const -> int
    {
        return first_week + size() - 1;
    }
    [[nodiscard]] auto has_week(int week) const -> bool
    {
        return week >= first_week && week <= last_week();
    }
    [[nodiscard]] auto at_week(int week) const -> double
    {
        return values[static_cast<std::size_t>(week - first_week)];
    }
};

// Per-channel linear map: normalized = (x - offset) / scale.
struct ScalingSpec
{
    std::array<double, channel_count> offset{};
    std::array<double, channel_count> scale{ 1, 1, 1, 1, 1 };

    [[nodiscard]] auto normalize(Channel c, double x) const -> double
    {
        const auto i = static_cast<std::size_t>(c);
        return (x - offset[i]) / scale[i];
    }
    [[nodiscard]] auto denormalize(Channel c, double u) const -> double
    {
        const auto i = static_cast<std::size_t>(c);
        return u * scale[i] + offset[i];
    }
};

// Five aligned weekly channels.  All series share the week axis and end
// week; hospitalizations may start later than week 1.
struct Dataset
{
    std::array<WeeklySeries, channel_count> channels;
    ScalingSpec scaling;

    [[nodiscard]] auto channel(Channel c) -> WeeklySeries&
    {
        return channels[static_cast<std::size_t>(c)];
    }
    [[nodiscard]] auto channel(Channel c) const -> const WeeklySeries&
    {
        return channels[static_cast<std::size_t>(c)];
    }
    [[nodiscard]] auto last_week() const -> int;
};

} // namespace epi
