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

#include "epi/run_config.hpp"

#include "epi/csv.hpp"
#include "epi/errors.hpp"

#include <cstdlib>
#include <sstream>

namespace epi {

namespace {

auto trim(std::string_view text) -> std::string_view
{
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

auto parse_number_list(std::string_view value, int line)
    -> std::vector<double>
{
    std::istringstream in{ std::string(value) };
    std::vector<double> numbers;
    std::string token;
    while (in >> token) {
        numbers.push_back(parse_double(token, line));
    }
    if (numbers.empty()) {
        throw ParseError("expected a number list", line);
    }
    return numbers;
}

} // namespace

auto parse_run_config(const std::string& text) -> RunConfig
{
    RunConfig config;
    std::istringstream in(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const auto line = trim(raw_line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = std::string(trim(line.substr(eq + 1)));
        auto& backtest = config.backtest;
        if (key == "epochs") {
            backtest.train.epochs = parse_long(value, line_no);
        } else if (key == "learning_rate") {
            backtest.train.learning_rate = parse_double(value, line_no);
        } else if (key == "l2_coefficient") {
            backtest.train.l2_coefficient = parse_double(value, line_no);
        } else if (key == "seed") {
            char* end = nullptr;
            backtest.train.seed = std::strtoull(value.c_str(), &end, 10);
            if (end == value.c_str() || *end != '\0') {
                throw ParseError("invalid seed '" + value + "'", line_no);
            }
        } else if (key == "w_ode") {
            backtest.weights.w_ode = parse_double(value, line_no);
        } else if (key == "equation_weights") {
            const auto numbers = parse_number_list(value, line_no);
            if (numbers.size() != compartment_count) {
                throw ParseError("equation_weights needs 9 numbers", line_no);
            }
            std::copy(numbers.begin(), numbers.end(),
                      backtest.weights.equation.begin());
        } else if (key == "data_weights") {
            const auto numbers = parse_number_list(value, line_no);
            if (numbers.size() != channel_count) {
                throw ParseError("data_weights needs 5 numbers", line_no);
            }
            std::copy(numbers.begin(), numbers.end(),
                      backtest.weights.data.begin());
        } else if (key == "collocation_per_week") {
            backtest.collocation_per_week =
                static_cast<int>(parse_long(value, line_no));
        } else if (key == "horizons") {
            const auto numbers = parse_number_list(value, line_no);
            backtest.horizons.clear();
            for (const double h : numbers) {
                backtest.horizons.push_back(static_cast<int>(h));
            }
        } else if (key == "first_origin") {
            backtest.first_origin = static_cast<int>(parse_long(value, line_no));
        } else if (key == "last_origin") {
            backtest.last_origin = static_cast<int>(parse_long(value, line_no));
        } else if (key == "window_length") {
            backtest.window_length =
                static_cast<int>(parse_long(value, line_no));
        } else if (key == "workers") {
            backtest.workers = static_cast<int>(parse_long(value, line_no));
        } else if (key == "week1_end_date") {
            const auto date = parse_date(value);
            if (!date) {
                throw ParseError("invalid date '" + value + "'", line_no);
            }
            config.week1_end = *date;
        } else if (key == "out_dir") {
            config.out_dir = value;
        } else {
            throw ParseError("unknown config key '" + std::string(key) + "'",
                             line_no);
        }
    }
    return config;
}

auto write_run_config(const RunConfig& config) -> std::string
{
    const auto& backtest = config.backtest;
    std::ostringstream out;
    out << "epochs = " << backtest.train.epochs << '\n'
        << "learning_rate = " << format_double(backtest.train.learning_rate)
        << '\n'
        << "l2_coefficient = " << format_double(backtest.train.l2_coefficient)
        << '\n'
        << "seed = " << backtest.train.seed << '\n'
        << "w_ode = " << format_double(backtest.weights.w_ode) << '\n';
    out << "equation_weights =";
    for (const double w : backtest.weights.equation) {
        out << ' ' << format_double(w);
    }
    out << '\n' << "data_weights =";
    for (const double w : backtest.weights.data) {
        out << ' ' << format_double(w);
    }
    out << '\n'
        << "collocation_per_week = " << backtest.collocation_per_week << '\n';
    out << "horizons =";
    for (const int h : backtest.horizons) {
        out << ' ' << h;
    }
    out << '\n'
        << "first_origin = " << backtest.first_origin << '\n'
        << "last_origin = " << backtest.last_origin << '\n'
        << "window_length = " << backtest.window_length << '\n'
        << "workers = " << backtest.workers << '\n'
        << "week1_end_date = " << format_date(config.week1_end) << '\n'
        << "out_dir = " << config.out_dir << '\n';
    return out.str();
}

} // namespace epi
