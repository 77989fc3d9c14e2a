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

#include "epi/scoring.hpp"

#include "epi/csv.hpp"
#include "epi/errors.hpp"
#include "epi/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace epi {

auto mae(const std::vector<double>& predictions,
         const std::vector<double>& observations) -> double
{
    if (predictions.empty()) {
        throw InvalidArgument("mae: empty input");
    }
    if (predictions.size() != observations.size()) {
        throw InvalidArgument("mae: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        sum += std::abs(predictions[i] - observations[i]);
    }
    return sum / static_cast<double>(predictions.size());
}

auto naive_forecast(const WeeklySeries& series, int origin_week, int horizon)
    -> std::vector<double>
{
    if (horizon < 1) {
        throw InvalidArgument("naive_forecast: horizon must be >= 1");
    }
    if (origin_week - horizon + 1 < series.first_week
        || origin_week > series.last_week()) {
        throw InvalidArgument("naive_forecast: origin window out of range");
    }
    std::vector<double> block;
    block.reserve(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        block.push_back(series.at_week(origin_week + h - horizon));
    }
    return block;
}

auto mase(const std::vector<double>& model_predictions,
          const std::vector<double>& observations,
          const std::vector<double>& naive_predictions) -> double
{
    const double naive_mae = mae(naive_predictions, observations);
    if (naive_mae == 0.0) {
        throw InvalidArgument("mase: naive MAE is zero on this set");
    }
    return mae(model_predictions, observations) / naive_mae;
}

auto interval_score(double lower, double upper, double alpha, double y)
    -> double
{
    if (lower > upper) {
        throw InvalidArgument("interval_score: lower exceeds upper");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw InvalidArgument("interval_score: alpha must be in (0, 1)");
    }
    double score = upper - lower;
    if (y < lower) {
        score += 2.0 / alpha * (lower - y);
    } else if (y > upper) {
        score += 2.0 / alpha * (y - upper);
    }
    return score;
}

namespace {

auto quantile_at_level(const QuantileForecast& forecast, double level)
    -> double
{
    for (std::size_t i = 0; i < quantile_levels.size(); ++i) {
        if (std::abs(quantile_levels[i] - level) < 1e-12) {
            return forecast.values[i];
        }
    }
    throw InvalidArgument("forecast is missing quantile level "
                          + format_double(level));
}

} // namespace

auto wis(const QuantileForecast& forecast, double y) -> double
{
    const double median = quantile_at_level(forecast, 0.5);
    double total = 0.5 * std::abs(y - median);
    for (const double alpha : wis_alphas) {
        const double lower = quantile_at_level(forecast, alpha / 2.0);
        const double upper = quantile_at_level(forecast, 1.0 - alpha / 2.0);
        total += alpha / 2.0 * interval_score(lower, upper, alpha, y);
    }
    return total / (static_cast<double>(wis_alphas.size()) + 0.5);
}

auto scaled_wis(double model_wis, double naive_wis) -> double
{
    if (!(naive_wis > 0.0)) {
        throw InvalidArgument("scaled_wis: naive WIS must be positive");
    }
    return model_wis / naive_wis;
}

auto ScoreReport::find(const std::string& method,
                       Channel target,
                       int horizon) const -> const ScoreCell*
{
    for (const auto& cell : cells) {
        if (cell.method == method && cell.target == target
            && cell.horizon == horizon) {
            return &cell;
        }
    }
    return nullptr;
}

auto build_report(const std::vector<QuantileForecast>& model_forecasts,
                  const Dataset& dataset,
                  const std::string& method) -> ScoreReport
{
    // Denormalized truth per target.
    const auto truth = [&](Channel target, int week) -> double {
        return dataset.scaling.denormalize(
            target, dataset.channel(target).at_week(week));
    };

    std::map<std::pair<int, int>, const QuantileForecast*> model_by_key[3];
    const auto target_index = [](Channel target) -> std::size_t {
        switch (target) {
        case Channel::cases: return 0;
        case Channel::deaths: return 1;
        case Channel::hosp: return 2;
        default:
            throw InvalidArgument("channel is not a forecast target");
        }
    };
    for (const auto& forecast : model_forecasts) {
        model_by_key[target_index(forecast.target)]
                    [{ forecast.origin_week, forecast.horizon }] = &forecast;
    }

    // Naive point forecasts everywhere the block is available; their
    // quantiles use the naive model's own causal error history.
    std::vector<PointForecast> naive_points;
    for (const auto target : forecast_targets) {
        const auto& series = dataset.channel(target);
        for (int horizon = 1; horizon <= 4; ++horizon) {
            for (int origin = series.first_week + horizon - 1;
                 origin <= series.last_week(); ++origin) {
                naive_points.push_back(
                    { target, horizon, origin,
                      naive_forecast(series, origin, horizon).back() });
            }
        }
    }
    const auto naive_quantiles = build_quantile_series(naive_points, dataset);
    std::map<std::pair<int, int>, const QuantileForecast*> naive_by_key[3];
    for (const auto& forecast : naive_quantiles) {
        naive_by_key[target_index(forecast.target)]
                    [{ forecast.origin_week, forecast.horizon }] = &forecast;
    }

    ScoreReport report;
    for (const auto target : forecast_targets) {
        const auto& series = dataset.channel(target);
        for (int horizon = 1; horizon <= 4; ++horizon) {
            std::vector<double> model_mu;
            std::vector<double> naive_mu;
            std::vector<double> observed;
            double model_wis_sum = 0.0;
            double naive_wis_sum = 0.0;
            for (const auto& [key, model] :
                 model_by_key[target_index(target)]) {
                if (key.second != horizon) {
                    continue;
                }
                const int week = key.first + horizon;
                if (!series.has_week(week)) {
                    continue;
                }
                const auto naive_it =
                    naive_by_key[target_index(target)].find(key);
                if (naive_it == naive_by_key[target_index(target)].end()) {
                    continue;
                }
                const double y = truth(target, week);
                model_mu.push_back(model->mu);
                naive_mu.push_back(naive_it->second->mu);
                observed.push_back(y);
                model_wis_sum += wis(*model, y);
                naive_wis_sum += wis(*naive_it->second, y);
            }
            if (observed.empty()) {
                continue;
            }
            ScoreCell cell;
            cell.method = method;
            cell.target = target;
            cell.horizon = horizon;
            cell.n_evaluated = static_cast<int>(observed.size());
            cell.mase = mase(model_mu, observed, naive_mu);
            cell.wis = model_wis_sum / static_cast<double>(observed.size());
            cell.scaled_wis = scaled_wis(
                cell.wis, naive_wis_sum / static_cast<double>(observed.size()));
            report.cells.push_back(std::move(cell));
        }
    }
    if (report.cells.empty()) {
        throw InvalidArgument("build_report: no scorable cells");
    }
    return report;
}

auto write_report_csv(const ScoreReport& report) -> std::string
{
    std::ostringstream out;
    out << "method,target,horizon,mase,wis,scaled_wis,n_evaluated\n";
    for (const auto& cell : report.cells) {
        out << cell.method << ',' << channel_name(cell.target) << ','
            << cell.horizon << ',' << format_double(cell.mase) << ','
            << format_double(cell.wis) << ',' << format_double(cell.scaled_wis)
            << ',' << cell.n_evaluated << '\n';
    }
    return out.str();
}

auto read_report_csv(const std::string& text) -> ScoreReport
{
    const auto table = parse_csv(text);
    const std::vector<std::string> expected{
        "method", "target", "horizon", "mase", "wis", "scaled_wis",
        "n_evaluated",
    };
    if (table.header != expected) {
        throw ParseError("unexpected report header");
    }
    ScoreReport report;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const int line = table.row_lines[r];
        if (row.size() != 7) {
            throw ParseError("expected 7 fields", line);
        }
        ScoreCell cell;
        cell.method = row[0];
        const auto target = channel_from_name(row[1]);
        if (!target) {
            throw ParseError("unknown target '" + row[1] + "'", line);
        }
        cell.target = *target;
        cell.horizon = static_cast<int>(parse_long(row[2], line));
        cell.mase = parse_double(row[3], line);
        cell.wis = parse_double(row[4], line);
        cell.scaled_wis = parse_double(row[5], line);
        cell.n_evaluated = static_cast<int>(parse_long(row[6], line));
        report.cells.push_back(std::move(cell));
    }
    return report;
}

auto format_report_table(const ScoreReport& report) -> std::string
{
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %-8s %7s %8s %12s %10s %6s\n",
                  "method", "target", "horizon", "MASE", "WIS", "scaledWIS",
                  "n");
    out << buf;
    for (const auto& cell : report.cells) {
        std::snprintf(buf, sizeof(buf), "%-10s %-8s %7d %8.3f %12.3f %10.3f %6d\n",
                      cell.method.c_str(),
                      std::string(channel_name(cell.target)).c_str(),
                      cell.horizon, cell.mase, cell.wis, cell.scaled_wis,
                      cell.n_evaluated);
        out << buf;
    }
    return out.str();
}

} // namespace epi
