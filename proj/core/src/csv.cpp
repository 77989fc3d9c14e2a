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

#include "epi/csv.hpp"

#include "epi/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace epi {

auto CsvTable::column_index(std::string_view name) const -> std::optional<int>
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

namespace {

// Splits one logical CSV record starting at pos.  Handles quoted fields
// with embedded commas, doubled quotes, and embedded newlines; advances
// pos past the record terminator and line past consumed newlines.
auto parse_record(std::string_view text,
                  std::size_t& pos,
                  int& line) -> std::vector<std::string>
{
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    in_quotes = false;
                    ++pos;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
                ++pos;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            in_quotes = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++pos;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
                ++pos;
            }
            ++pos;
            ++line;
            break;
        } else {
            field.push_back(c);
            ++pos;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace

auto parse_csv(std::string_view text) -> CsvTable
{
    CsvTable table;
    std::size_t pos = 0;
    int line = 1;
    if (pos < text.size()) {
        table.header = parse_record(text, pos, line);
    }
    while (pos < text.size()) {
        const int row_line = line;
        auto fields = parse_record(text, pos, line);
        if (fields.size() == 1 && fields[0].empty()) {
            continue; // blank line
        }
        table.rows.push_back(std::move(fields));
        table.row_lines.push_back(row_line);
    }
    return table;
}

auto read_csv_file(const std::string& path) -> CsvTable
{
    return parse_csv(read_text_file(path));
}

auto read_text_file(const std::string& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    std::ostringstream out;
    out << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure: " + path);
    }
    return out.str();
}

auto write_text_file(const std::string& path, std::string_view text) -> void
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing: " + path);
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("write failure: " + path);
    }
}

auto format_double(double value) -> std::string
{
    char buf[40];
    // Moderate integers print in plain decimal; %g would pick
    // scientific notation once trailing zeros drop the significant
    // digit count below the exponent (1200 -> "1.2e+03").
    if (value == std::floor(value) && std::abs(value) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", value);
        return buf;
    }
    // Probe increasing precision until the value round-trips; keeps
    // golden files short while staying bit-exact.
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) {
            break;
        }
    }
    return buf;
}

auto parse_double(std::string_view text, int line) -> double
{
    const std::string buf(text);
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("invalid number: '" + buf + "'", line);
    }
    return value;
}

auto parse_long(std::string_view text, int line) -> long long
{
    const std::string buf(text);
    char* end = nullptr;
    errno = 0;
    const long long value = std::strtoll(buf.c_str(), &end, 10);
    if (end == buf.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("invalid integer: '" + buf + "'", line);
    }
    return value;
}

} // namespace epi
