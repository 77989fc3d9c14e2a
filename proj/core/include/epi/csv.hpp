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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epi {

// A fully materialized CSV file.  Quoted fields may contain commas and
// doubled quotes; rows_lines keeps the 1-based source line of each data
// row so parse errors can point at the original file.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_lines;

    [[nodiscard]] auto column_index(std::string_view name) const
        -> std::optional<int>;
};

auto parse_csv(std::string_view text) -> CsvTable;
auto read_csv_file(const std::string& path) -> CsvTable;

auto read_text_file(const std::string& path) -> std::string;
auto write_text_file(const std::string& path, std::string_view text) -> void;

// Shortest round-trippable decimal form ("%.17g" trimmed); used for all
// golden CSV output so files compare byte for byte across runs.
auto format_double(double value) -> std::string;
auto parse_double(std::string_view text, int line = 0) -> double;
auto parse_long(std::string_view text, int line = 0) -> long long;

} // namespace epi
