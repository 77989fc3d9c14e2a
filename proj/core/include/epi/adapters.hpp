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

#include "epi/csv.hpp"
#include "epi/series.hpp"

#include <string>

namespace epi {

// JHU CSSE wide format: one row per county, one column per date
// (M/D/YY), values cumulative.  Rows matching Province_State are summed
// per date and differenced into daily new counts; negative diffs from
// upstream corrections are clamped to 0.
auto adapt_jhu_cumulative(const CsvTable& table,
                          const std::string& province_state,
                          Channel channel) -> RawSeries;

// HHS facility report: daily rows with adult and pediatric confirmed
// admission columns; the channel value is their sum.
auto adapt_hhs_admissions(const CsvTable& table) -> RawSeries;

// Google community mobility report: daily rows filtered to one region
// (sub_region_1 match, sub_region_2 empty), reading the residential
// percent change column.
auto adapt_google_mobility(const CsvTable& table,
                           const std::string& sub_region_1) -> RawSeries;

} // namespace epi
