// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISDOA_SCENARIO_HPP
#define RISDOA_SCENARIO_HPP

#include <cstddef>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace risdoa
{
    // Constant modulus (|w| = 1) with phase uniform on (phase_lo, phase_hi).
    struct UniformPhase
    {
        double phase_lo = 0.0;
        double phase_hi = 2.0 * std::numbers::pi;
    };

    // Unit modulus, phase drawn from a finite level set.
    struct DiscretePhase
    {
        std::vector<double> phases{std::numbers::pi / 2.0, -std::numbers::pi / 2.0};
        std::vector<double> probs{0.5, 0.5};
    };

    // Amplitude x with probability p, y otherwise; phase uniform on (0, 2pi).
    struct DiscreteAmplitude
    {
        double x = 1.0;
        double y = 3.0;
        double p = 0.5;
    };

    // Law of a single RIS reflection coefficient w = beta * exp(j alpha).
    using RisDistribution = std::variant<UniformPhase, DiscretePhase, DiscreteAmplitude>;

    void validate(const RisDistribution &dist);
    std::string describe(const RisDistribution &dist);

    enum class SignalModel
    {
        uncorrelated_diagonal, // R = diag(powers)
        coherent_all_one       // R = p * ones (all targets share one symbol stream)
    };

    std::string to_string(SignalModel model);
    SignalModel parse_signal_model(const std::string &name);

    // One problem instance. Angles are spatial frequencies (the exponent of exp(j k theta)).
    struct Scenario
    {
        std::vector<double> thetas; // K target spatial frequencies
        std::vector<double> phis;   // R sensor spatial frequencies
        std::size_t n_elements = 0; // N
        std::size_t n_slots = 1;    // T
        std::vector<double> powers; // per-target p_i, linear
        double noise_power = 1.0;   // sigma^2, linear
        SignalModel signal_model = SignalModel::uncorrelated_diagonal;
        RisDistribution ris = UniformPhase{};

        std::size_t num_targets() const { return thetas.size(); }
        std::size_t num_sensors() const { return phis.size(); }
        double snr(std::size_t i) const { return powers.at(i) / noise_power; }
    };

    // Throws PreconditionError when any Scenario invariant is violated.
    void validate(const Scenario &scenario);

    // Stable hex digest of every field; used to tag derived results.
    std::string fingerprint(const Scenario &scenario);

    // Maps an angle to (-pi, pi].
    double wrap_angle(double angle);

    double db_to_linear(double db);
}

#endif
