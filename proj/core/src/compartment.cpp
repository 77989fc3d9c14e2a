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

#include "epi/compartment.hpp"

#include "epi/csv.hpp"
#include "epi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epi {

auto compartment_name(Compartment c) -> std::string
{
    switch (c) {
    case Compartment::X: return "X";
    case Compartment::L: return "L";
    case Compartment::Y: return "Y";
    case Compartment::Z: return "Z";
    case Compartment::Z_r: return "Z_r";
    case Compartment::H: return "H";
    case Compartment::A: return "A";
    case Compartment::D: return "D";
    case Compartment::D_r: return "D_r";
    }
    return "?";
}

namespace {

auto require_finite(const CompartmentState& state, const char* what) -> void
{
    for (const double v : state) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(what) + " is not finite");
        }
    }
}

} // namespace

auto rhs(const CompartmentState& state, double beta, const RateParams& params)
    -> CompartmentState
{
    require_finite(state, "rhs: state");
    if (!std::isfinite(beta)) {
        throw NumericError("rhs: beta is not finite");
    }
    const double x = state[0];
    const double l = state[1];
    const double y = state[2];
    const double z = state[3];
    const double h = state[5];
    const double d = state[7];
    const double infection = beta * x * y / params.population;
    const double removal = params.gamma * y;
    return {
        -infection,                               // dX
        infection - params.eta * l,               // dL
        params.eta * l - removal,                 // dY
        params.rho * removal - params.gamma_z * z, // dZ
        params.gamma_z * z,                       // dZ_r
        params.p_h * removal - params.gamma_h * h, // dH
        params.p_h * removal,                     // dA
        params.p_d * params.gamma_h * h - params.gamma_d * d, // dD
        params.gamma_d * d,                       // dD_r
    };
}

auto residual(const CompartmentState& state,
              const CompartmentState& dstate,
              double beta,
              const RateParams& params) -> CompartmentState
{
    require_finite(dstate, "residual: dstate");
    const auto flows = rhs(state, beta, params);
    CompartmentState f{};
    for (int i = 0; i < compartment_count; ++i) {
        f[static_cast<std::size_t>(i)] =
            dstate[static_cast<std::size_t>(i)]
            - flows[static_cast<std::size_t>(i)];
    }
    return f;
}

auto integrate_rk4(const CompartmentState& initial,
                   const TransmissionSignal& beta_fn,
                   const RateParams& params,
                   double t0,
                   double t1,
                   double dt) -> std::vector<TrajectoryPoint>
{
    if (!(t1 > t0) || !(dt > 0) || dt > t1 - t0) {
        throw InvalidArgument("integrate_rk4: need t1 > t0 and 0 < dt <= span");
    }
    std::vector<TrajectoryPoint> trajectory;
    trajectory.push_back({ t0, initial });
    CompartmentState state = initial;
    const auto axpy = [](const CompartmentState& s, double a,
                         const CompartmentState& k) {
        CompartmentState out;
        for (std::size_t i = 0; i < compartment_count; ++i) {
            out[i] = s[i] + a * k[i];
        }
        return out;
    };
    // Step times come from the step index, not accumulation, so they do
    // not drift; the final step is shortened onto t1.
    const auto steps = std::max<long long>(
        1, static_cast<long long>(std::ceil((t1 - t0) / dt - 1e-9)));
    for (long long i = 0; i < steps; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        const double t_next =
            (i == steps - 1) ? t1 : t0 + static_cast<double>(i + 1) * dt;
        const double h = t_next - t;
        const auto k1 = rhs(state, beta_fn(t), params);
        const auto k2 = rhs(axpy(state, h / 2, k1), beta_fn(t + h / 2), params);
        const auto k3 = rhs(axpy(state, h / 2, k2), beta_fn(t + h / 2), params);
        const auto k4 = rhs(axpy(state, h, k3), beta_fn(t + h), params);
        for (std::size_t i2 = 0; i2 < compartment_count; ++i2) {
            state[i2] += h / 6 * (k1[i2] + 2 * k2[i2] + 2 * k3[i2] + k4[i2]);
        }
        require_finite(state, "integrate_rk4: state");
        trajectory.push_back({ t_next, state });
    }
    return trajectory;
}

auto BetaSchedule::operator()(double t) const -> double
{
    if (knot_times.empty()) {
        return 0.0;
    }
    if (t <= knot_times.front()) {
        return knot_values.front();
    }
    if (t >= knot_times.back()) {
        return knot_values.back();
    }
    const auto upper =
        std::upper_bound(knot_times.begin(), knot_times.end(), t);
    const auto i = static_cast<std::size_t>(upper - knot_times.begin());
    const double t0 = knot_times[i - 1];
    const double t1 = knot_times[i];
    const double w = (t - t0) / (t1 - t0);
    return knot_values[i - 1] + w * (knot_values[i] - knot_values[i - 1]);
}

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

} // namespace

auto parse_scenario(const std::string& text) -> Scenario
{
    Scenario scenario;
    std::istringstream in(text);
    std::string raw_line;
    int line_no = 0;
    bool have_beta = false;
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
        const auto value = trim(line.substr(eq + 1));
        if (key == "beta_knots") {
            // Knot list: "(t, beta) (t, beta) ..."
            std::string cleaned(value);
            for (auto& c : cleaned) {
                if (c == '(' || c == ')' || c == ',') {
                    c = ' ';
                }
            }
            std::istringstream knots(cleaned);
            double t = 0;
            double b = 0;
            while (knots >> t >> b) {
                if (!scenario.beta.knot_times.empty()
                    && t <= scenario.beta.knot_times.back()) {
                    throw ParseError("beta knot times must increase", line_no);
                }
                scenario.beta.knot_times.push_back(t);
                scenario.beta.knot_values.push_back(b);
            }
            if (scenario.beta.knot_times.empty()) {
                throw ParseError("beta_knots has no knots", line_no);
            }
            have_beta = true;
            continue;
        }
        const double number = parse_double(value, line_no);
        bool known = true;
        if (key == "initial.X") {
            scenario.initial[0] = number;
        } else if (key == "initial.L") {
            scenario.initial[1] = number;
        } else if (key == "initial.Y") {
            scenario.initial[2] = number;
        } else if (key == "initial.Z") {
            scenario.initial[3] = number;
        } else if (key == "initial.Z_r") {
            scenario.initial[4] = number;
        } else if (key == "initial.H") {
            scenario.initial[5] = number;
        } else if (key == "initial.A") {
            scenario.initial[6] = number;
        } else if (key == "initial.D") {
            scenario.initial[7] = number;
        } else if (key == "initial.D_r") {
            scenario.initial[8] = number;
        } else if (key == "population") {
            scenario.params.population = number;
        } else if (key == "eta") {
            scenario.params.eta = number;
        } else if (key == "gamma") {
            scenario.params.gamma = number;
        } else if (key == "gamma_d") {
            scenario.params.gamma_d = number;
        } else if (key == "gamma_z") {
            scenario.params.gamma_z = number;
        } else if (key == "gamma_h") {
            scenario.params.gamma_h = number;
        } else if (key == "rho") {
            scenario.params.rho = number;
        } else if (key == "p_h") {
            scenario.params.p_h = number;
        } else if (key == "p_d") {
            scenario.params.p_d = number;
        } else {
            known = false;
        }
        if (!known) {
            throw ParseError("unknown scenario key '" + std::string(key) + "'",
                             line_no);
        }
    }
    if (!have_beta) {
        throw ParseError("scenario is missing beta_knots");
    }
    return scenario;
}

auto write_scenario(const Scenario& scenario) -> std::string
{
    std::ostringstream out;
    const char* names[compartment_count] = { "X", "L", "Y", "Z", "Z_r",
                                             "H", "A", "D", "D_r" };
    for (std::size_t i = 0; i < compartment_count; ++i) {
        out << "initial." << names[i] << " = "
            << format_double(scenario.initial[i]) << '\n';
    }
    const auto& p = scenario.params;
    out << "population = " << format_double(p.population) << '\n'
        << "eta = " << format_double(p.eta) << '\n'
        << "gamma = " << format_double(p.gamma) << '\n'
        << "gamma_d = " << format_double(p.gamma_d) << '\n'
        << "gamma_z = " << format_double(p.gamma_z) << '\n'
        << "gamma_h = " << format_double(p.gamma_h) << '\n'
        << "rho = " << format_double(p.rho) << '\n'
        << "p_h = " << format_double(p.p_h) << '\n'
        << "p_d = " << format_double(p.p_d) << '\n';
    out << "beta_knots =";
    for (std::size_t i = 0; i < scenario.beta.knot_times.size(); ++i) {
        out << " (" << format_double(scenario.beta.knot_times[i]) << ", "
            << format_double(scenario.beta.knot_values[i]) << ")";
    }
    out << '\n';
    return out.str();
}

} // namespace epi
