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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace epi {

using Date = std::chrono::year_month_day;

/// Parse YYYY-MM-DD. Returns nullopt on any syntax or calendar error.
auto parse_date(std::string_view text) -> std::optional<Date>;

/// Parse the M/D/YY shape used by the JHU wide-format column headers.
/// Two-digit years are taken as 20YY.
auto parse_date_mdy(std::string_view text) -> std::optional<Date>;

auto format_date(Date date) -> std::string;

/// Serial day count (days since the civil epoch 1970-01-01).
auto day_number(Date date) -> int;

auto date_from_day_number(int days) -> Date;

/// date + n days.
auto add_days(Date date, int days) -> Date;

} // namespace epi
