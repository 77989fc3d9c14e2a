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

#include "epi/dates.hpp"

#include <cstdio>

namespace epi {

namespace {

auto make_date(int y, int m, int d) -> std::optional<Date>
{
    const Date date{ std::chrono::year{ y },
                     std::chrono::month{ static_cast<unsigned>(m) },
                     std::chrono::day{ static_cast<unsigned>(d) } };
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

} // namespace

auto parse_date(std::string_view text) -> std::optional<Date>
{
    int y = 0;
    int m = 0;
    int d = 0;
    char tail = 0;
    if (text.size() != 10) {
        return std::nullopt;
    }
    const std::string buf(text);
    if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3) {
        return std::nullopt;
    }
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        return std::nullopt;
    }
    return make_date(y, m, d);
}

auto parse_date_mdy(std::string_view text) -> std::optional<Date>
{
    int y = 0;
    int m = 0;
    int d = 0;
    char tail = 0;
    const std::string buf(text);
    if (std::sscanf(buf.c_str(), "%2d/%2d/%4d%c", &m, &d, &y, &tail) != 3) {
        return std::nullopt;
    }
    if (y < 100) {
        y += 2000;
    }
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        return std::nullopt;
    }
    return make_date(y, m, d);
}

auto format_date(Date date) -> std::string
{
    char buf[16];
    std::snprintf(buf,
                  sizeof(buf),
                  "%04d-%02d-%02d",
                  static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()),
                  static_cast<unsigned>(date.day()));
    return buf;
}

auto day_number(Date date) -> int
{
    return static_cast<int>(
        std::chrono::sys_days{ date }.time_since_epoch().count());
}

auto date_from_day_number(int days) -> Date
{
    return Date{ std::chrono::sys_days{ std::chrono::days{ days } } };
}

auto add_days(Date date, int days) -> Date
{
    return date_from_day_number(day_number(date) + days);
}

} // namespace epi
