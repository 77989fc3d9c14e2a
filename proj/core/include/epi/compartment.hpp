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
#include <functional>
#include <string>
#include <vector>

namespace epi {

inline constexpr int compartment_count = 9;

// State component order: X (susceptible), L (latent), Y (infectious),
// Z (cases awaiting report), Z_r (cumulative reported cases),
// H (hospitalized), A (cumulative hospital admissions),
// D (deaths awaiting report), D_r (cumulative reported deaths).
using CompartmentState = std::array<double, compartment_count>;

enum class Compartment : int
{
    X = 0,
    L = 1,
    Y = 2,
    Z = 3,
    Z_r = 4,
    H = 5,
    A = 6,
    D = 7,
    D_r = 8,
};

auto compartment_name(Compartment c) -> std::string;

// Per-day flow rates.  p_h and p_d are constants here; during training
// they come from the model's squashed scalars.
struct RateParams
{
    double population = 39'512'223.0;
    double eta = 0.25;     // latent -> infectious
    double gamma = 0.25;   // infectious -> removed
    double gamma_d = 0.1;  // death reporting
    double gamma_z = 1.0;  // case reporting
    double gamma_h = 0.1;  // hospital exit
    double rho = 0.5;      // case ascertainment probability
    double p_h = 0.1;      // hospitalization probability
    double p_d = 0.1;      // death probability given hospitalization
};

using TransmissionSignal = std::function<double(double)>;

// Time derivatives of the nine compartments at the given state and
// instantaneous transmission rate.
auto rhs(const CompartmentState& state, double beta, const RateParams& params)
    -> CompartmentState;

// Residual f = dstate - rhs(state); zero along exact trajectories.
auto residual(const CompartmentState& state,
              const CompartmentState& dstate,
              double beta,
              const RateParams& params) -> CompartmentState;

struct TrajectoryPoint
{
    double t = 0.0;
    CompartmentState state{};
};

// Classical fixed-step RK4; the final step is shortened to land exactly
// on t1, and both endpoints are included in the trajectory.
auto integrate_rk4(const CompartmentState& initial,
                   const TransmissionSignal& beta_fn,
                   const RateParams& params,
                   double t0,
                   double t1,
                   double dt) -> std::vector<TrajectoryPoint>;

// Piecewise-linear transmission rate through (t, beta) knots; constant
// extrapolation beyond the first and last knot.
struct BetaSchedule
{
    std::vector<double> knot_times;
    std::vector<double> knot_values;

    [[nodiscard]] auto operator()(double t) const -> double;
};

// Synthetic-run description: initial state, rate overrides, and a beta
// schedule, in a line-oriented `key = value` text format.
struct Scenario
{
    CompartmentState initial{};
    RateParams params;
    BetaSchedule beta;
};

auto parse_scenario(const std::string& text) -> Scenario;
auto write_scenario(const Scenario& scenario) -> std::string;

} // namespace epi
