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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace epi {

// Deterministic RNG.  The raw engine is std::mt19937_64 (bit-exact on
// every platform); the distributions are hand-rolled because the
// std::*_distribution classes are implementation defined.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine{ seed } {}

    // Uniform in [0, 1) with 53 random bits.
    auto uniform() -> double
    {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    }

    auto uniform(double lo, double hi) -> double
    {
        return lo + (hi - lo) * uniform();
    }

    // Standard normal via Box-Muller; the cached second value keeps the
    // stream one-engine-call-per-pair deterministic.
    auto normal() -> double
    {
        if (has_cached) {
            has_cached = false;
            return cached;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached = radius * std::sin(angle);
        has_cached = true;
        return radius * std::cos(angle);
    }

    auto raw() -> std::uint64_t { return engine(); }

private:
    std::mt19937_64 engine;
    double cached = 0.0;
    bool has_cached = false;
};

// Derives independent child seeds from (base, a, b); splitmix64-style
// finalizer so nearby inputs give unrelated outputs.
auto mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b)
    -> std::uint64_t;

} // namespace epi
