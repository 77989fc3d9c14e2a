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

#include "epi/quantiles.hpp"

#include "epi/csv.hpp"
#include "epi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

namespace epi {

auto ErrorHistory::slot(Channel target, int horizon) -> std::size_t
{
    if (horizon < 1 || horizon > 4) {
        throw InvalidArgument("horizon must be in 1..4");
    }
    std::size_t target_index = 0;
    switch (target) {
    case Channel::cases: target_index = 0; break;
    case Channel::deaths: target_index = 1; break;
    case Channel::hosp: target_index = 2; break;
    default:
        throw InvalidArgument("channel is not a forecast target");
    }
    return target_index * 4 + static_cast<std::size_t>(horizon - 1);
}

auto ErrorHistory::add(Channel target, int horizon, double error) -> void
{
    if (!std::isfinite(error)) {
        throw InvalidArgument("error history entries must be finite");
    }
    by_cell[slot(target, horizon)].push_back(error);
}

auto ErrorHistory::errors(Channel target, int horizon) const
    -> const std::vector<double>&
{
    return by_cell[slot(target, horizon)];
}

auto estimate_sigma(const ErrorHistory& history,
                    Channel target,
                    int horizon,
                    double point_forecast) -> double
{
    const auto& errors = history.errors(target, horizon);
    if (errors.empty()) {
        return 0.1 * std::abs(point_forecast);
    }
    if (errors.size() == 1) {
        return std::abs(errors.front());
    }
    double mean = 0.0;
    for (const double e : errors) {
        mean += e;
    }
    mean /= static_cast<double>(errors.size());
    double variance = 0.0;
    for (const double e : errors) {
        variance += (e - mean) * (e - mean);
    }
    variance /= static_cast<double>(errors.size());
    return std::sqrt(variance);
}

namespace {

auto normal_cdf(double z) -> double
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Rational initial guess (Acklam's approximation), then two Halley
// refinements against erfc; good to ~1e-15 except at the extreme tails.
auto inverse_normal_guess(double p) -> double
{
    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02,
        -2.759285104469687e+02, 1.383577518672690e+02,
        -3.066479806614716e+01, 2.506628277459239e+00,
    };
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02,
        -1.556989798598866e+02, 6.680131188771972e+01,
        -1.328068155288572e+01,
    };
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01,
        -2.400758277161838e+00, -2.549732539343734e+00,
        4.374664141464968e+00,  2.938163982698783e+00,
    };
    static constexpr double d[4] = {
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    };
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q
                + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q
                 + c[5])
               / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r
            + a[5])
           * q
           / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r
              + 1.0);
}

} // namespace

auto inverse_normal_cdf(double p) -> double
{
    if (!(p > 0.0) || !(p < 1.0)) {
        throw InvalidArgument("probability must lie strictly in (0, 1)");
    }
    double z = inverse_normal_guess(p);
    constexpr double sqrt_two_pi = 2.506628274631000502;
    for (int iteration = 0; iteration < 2; ++iteration) {
        const double error = normal_cdf(z) - p;
        const double u = error * sqrt_two_pi * std::exp(0.5 * z * z);
        z -= u / (1.0 + 0.5 * z * u);
    }
    return z;
}

auto gaussian_quantile(double mu, double sigma, double p) -> double
{
    if (sigma < 0.0) {
        throw InvalidArgument("sigma must be >= 0");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        throw InvalidArgument("probability must lie strictly in (0, 1)");
    }
    if (sigma == 0.0) {
        return mu;
    }
    return mu + sigma * inverse_normal_cdf(p);
}

auto build_quantile_forecast(const PointForecast& point, double sigma)
    -> QuantileForecast
{
    QuantileForecast forecast;
    forecast.target = point.target;
    forecast.horizon = point.horizon;
    forecast.origin_week = point.origin_week;
    forecast.mu = point.value;
    forecast.sigma = sigma;
    for (std::size_t i = 0; i < quantile_levels.size(); ++i) {
        forecast.values[i] = std::max(
            0.0, gaussian_quantile(point.value, sigma, quantile_levels[i]));
    }
    return forecast;
}

auto build_quantile_series(const std::vector<PointForecast>& forecasts,
                           const Dataset& dataset)
    -> std::vector<QuantileForecast>
{
    std::vector<PointForecast> ordered = forecasts;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const PointForecast& x, const PointForecast& y) {
                         return x.origin_week < y.origin_week;
                     });
    const auto truth = [&](Channel target, int week) -> double {
        const auto& series = dataset.channel(target);
        return dataset.scaling.denormalize(target, series.at_week(week));
    };
    std::vector<QuantileForecast> out;
    out.reserve(ordered.size());
    for (const auto& point : ordered) {
        // Causal dispersion: only forecasts whose target week is already
        // observed at this origin may contribute errors.
        ErrorHistory history;
        for (const auto& past : ordered) {
            if (past.target != point.target || past.horizon != point.horizon
                || past.target_week() > point.origin_week) {
                continue;
            }
            if (!dataset.channel(past.target).has_week(past.target_week())) {
                continue;
            }
            history.add(past.target, past.horizon,
                        past.value - truth(past.target, past.target_week()));
        }
        const double sigma = estimate_sigma(history, point.target,
                                            point.horizon, point.value);
        out.push_back(build_quantile_forecast(point, sigma));
    }
    return out;
}

namespace {

auto hub_target_name(Channel target, int horizon) -> std::string
{
    std::string unit;
    switch (target) {
    case Channel::cases: unit = "inc case"; break;
    case Channel::deaths: unit = "inc death"; break;
    case Channel::hosp: unit = "inc hosp"; break;
    default:
        throw InvalidArgument("channel is not a forecast target");
    }
    return std::to_string(horizon) + " wk ahead " + unit;
}

auto hub_target_channel(const std::string& name, int line)
    -> std::pair<Channel, int>
{
    int horizon = 0;
    char unit[16] = {};
    if (std::sscanf(name.c_str(), "%d wk ahead inc %15s", &horizon, unit)
        != 2) {
        throw ParseError("unrecognized target '" + name + "'", line);
    }
    const std::string kind(unit);
    Channel target = Channel::cases;
    if (kind == "case") {
        target = Channel::cases;
    } else if (kind == "death") {
        target = Channel::deaths;
    } else if (kind == "hosp") {
        target = Channel::hosp;
    } else {
        throw ParseError("unrecognized target '" + name + "'", line);
    }
    return { target, horizon };
}

auto week_end_date(Date week1_end, int week) -> Date
{
    return add_days(week1_end, 7 * (week - 1));
}

auto week_from_date(Date week1_end, Date date, int line) -> int
{
    const int days = day_number(date) - day_number(week1_end);
    if (days % 7 != 0) {
        throw ParseError("date " + format_date(date)
                             + " is not on the weekly grid",
                         line);
    }
    return days / 7 + 1;
}

} // namespace

auto write_hub_csv(const std::vector<QuantileForecast>& forecasts,
                   Date week1_end) -> std::string
{
    std::ostringstream out;
    out << "forecast_date,target,target_end_date,type,quantile,value\n";
    for (const auto& forecast : forecasts) {
        const auto origin_date =
            format_date(week_end_date(week1_end, forecast.origin_week));
        const auto end_date =
            format_date(week_end_date(week1_end, forecast.target_week()));
        const auto target =
            hub_target_name(forecast.target, forecast.horizon);
        out << origin_date << ',' << target << ',' << end_date << ",point,,"
            << format_double(std::max(0.0, forecast.mu)) << '\n';
        for (std::size_t i = 0; i < quantile_levels.size(); ++i) {
            out << origin_date << ',' << target << ',' << end_date
                << ",quantile," << format_double(quantile_levels[i]) << ','
                << format_double(forecast.values[i]) << '\n';
        }
    }
    return out.str();
}

auto read_hub_csv(const std::string& text, Date week1_end)
    -> std::vector<QuantileForecast>
{
    const auto table = parse_csv(text);
    const std::vector<std::string> expected{
        "forecast_date", "target", "target_end_date",
        "type",          "quantile", "value",
    };
    if (table.header != expected) {
        throw ParseError("unexpected forecast-hub header");
    }
    struct Partial
    {
        QuantileForecast forecast;
        std::array<bool, quantile_level_count> seen{};
        bool have_point = false;
    };
    std::map<std::tuple<int, int, int>, Partial> partials;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        if (row.size() != 6) {
            throw ParseError("expected 6 fields", line);
        }
        const auto origin_date = parse_date(row[0]);
        const auto end_date = parse_date(row[2]);
        if (!origin_date || !end_date) {
            throw ParseError("invalid date", line);
        }
        const auto [target, horizon] = hub_target_channel(row[1], line);
        const int origin_week = week_from_date(week1_end, *origin_date, line);
        const int target_week = week_from_date(week1_end, *end_date, line);
        if (target_week != origin_week + horizon) {
            throw ParseError("target_end_date disagrees with horizon", line);
        }
        auto& partial = partials[{ static_cast<int>(target), origin_week,
                                   horizon }];
        partial.forecast.target = target;
        partial.forecast.horizon = horizon;
        partial.forecast.origin_week = origin_week;
        const double value = parse_double(row[5], line);
        if (row[3] == "point") {
            partial.forecast.mu = value;
            partial.have_point = true;
        } else if (row[3] == "quantile") {
            const double level = parse_double(row[4], line);
            bool found = false;
            for (std::size_t i = 0; i < quantile_levels.size(); ++i) {
                if (std::abs(quantile_levels[i] - level) < 1e-9) {
                    partial.forecast.values[i] = value;
                    partial.seen[i] = true;
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ParseError("unknown quantile level '" + row[4] + "'",
                                 line);
            }
        } else {
            throw ParseError("unknown row type '" + row[3] + "'", line);
        }
    }
    std::vector<QuantileForecast> forecasts;
    forecasts.reserve(partials.size());
    for (const auto& [key, partial] : partials) {
        if (!partial.have_point) {
            throw ParseError("forecast is missing its point row");
        }
        for (const bool seen : partial.seen) {
            if (!seen) {
                throw ParseError("forecast is missing a quantile level");
            }
        }
        forecasts.push_back(partial.forecast);
    }
    return forecasts;
}

} // namespace epi

