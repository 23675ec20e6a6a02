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

#include "risdoa/scenario.hpp"
#include "risdoa/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numeric>

namespace risdoa
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        bool finite_angle(double a)
        {
            return std::isfinite(a) && a > -std::numbers::pi && a <= std::numbers::pi;
        }

        // FNV-1a over raw bytes.
        struct Digest
        {
            std::uint64_t h = 1469598103934665603ULL;
            void bytes(const void *p, std::size_t n)
            {
                const auto *c = static_cast<const unsigned char *>(p);
                for (std::size_t i = 0; i < n; ++i)
                {
                    h ^= c[i];
                    h *= 1099511628211ULL;
                }
            }
            void add(double v) { bytes(&v, sizeof v); }
            void add(std::uint64_t v) { bytes(&v, sizeof v); }
            void add(const std::vector<double> &v)
            {
                add(static_cast<std::uint64_t>(v.size()));
                for (double x : v)
                    add(x);
            }
        };
    }

    void validate(const RisDistribution &dist)
    {
        std::visit(
            [](const auto &d)
            {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, UniformPhase>)
                {
                    require(d.phase_lo < d.phase_hi, "uniform phase: phase_lo must be < phase_hi");
                    require(d.phase_lo >= 0.0 && d.phase_hi <= two_pi, "uniform phase: bounds must lie in [0, 2pi]");
                }
                else if constexpr (std::is_same_v<T, DiscretePhase>)
                {
                    require(!d.phases.empty(), "discrete phase: empty level set");
                    require(d.phases.size() == d.probs.size(), "discrete phase: phases/probs length mismatch");
                    for (double q : d.probs)
                        require(q >= 0.0, "discrete phase: negative probability");
                    for (double a : d.phases)
                        require(std::isfinite(a), "discrete phase: non-finite level");
                    const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
                    require(std::abs(total - 1.0) <= 1e-12, "discrete phase: probabilities must sum to 1");
                }
                else
                {
                    require(d.x > 0.0 && d.y > 0.0, "discrete amplitude: x and y must be positive");
                    require(d.p >= 0.0 && d.p <= 1.0, "discrete amplitude: p must lie in [0, 1]");
                }
            },
            dist);
    }

    std::string describe(const RisDistribution &dist)
    {
        char buf[160];
        std::visit(
            [&](const auto &d)
            {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, UniformPhase>)
                    std::snprintf(buf, sizeof buf, "uniform-phase(%.17g,%.17g)", d.phase_lo, d.phase_hi);
                else if constexpr (std::is_same_v<T, DiscretePhase>)
                    std::snprintf(buf, sizeof buf, "discrete-phase(%zu levels)", d.phases.size());
                else
                    std::snprintf(buf, sizeof buf, "discrete-amplitude(%.17g,%.17g,%.17g)", d.x, d.y, d.p);
            },
            dist);
        return buf;
    }

    std::string to_string(SignalModel model)
    {
        return model == SignalModel::uncorrelated_diagonal ? "uncorrelated-diagonal" : "coherent-all-one";
    }

    SignalModel parse_signal_model(const std::string &name)
    {
        if (name == "uncorrelated-diagonal")
            return SignalModel::uncorrelated_diagonal;
        if (name == "coherent-all-one")
            return SignalModel::coherent_all_one;
        throw PreconditionError("unknown signal model '" + name + "'");
    }

    void validate(const Scenario &s)
    {
        require(!s.thetas.empty(), "scenario: need at least one target");
        require(!s.phis.empty(), "scenario: need at least one sensor");
        require(s.n_elements >= 2, "scenario: N must be >= 2");
        require(s.n_slots >= 1, "scenario: T must be >= 1");
        for (double a : s.thetas)
            require(finite_angle(a), "scenario: target angle outside (-pi, pi]");
        for (double a : s.phis)
            require(finite_angle(a), "scenario: sensor angle outside (-pi, pi]");
        require(s.powers.size() == s.thetas.size(), "scenario: need one power per target");
        for (double p : s.powers)
            require(std::isfinite(p) && p > 0.0, "scenario: powers must be positive");
        require(std::isfinite(s.noise_power) && s.noise_power > 0.0, "scenario: noise power must be positive");
        validate(s.ris);
    }

    std::string fingerprint(const Scenario &s)
    {
        Digest d;
        d.add(s.thetas);
        d.add(s.phis);
        d.add(static_cast<std::uint64_t>(s.n_elements));
        d.add(static_cast<std::uint64_t>(s.n_slots));
        d.add(s.powers);
        d.add(s.noise_power);
        d.add(static_cast<std::uint64_t>(s.signal_model));
        const std::string ris = describe(s.ris);
        d.bytes(ris.data(), ris.size());
        if (const auto *dp = std::get_if<DiscretePhase>(&s.ris))
        {
            d.add(dp->phases);
            d.add(dp->probs);
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d.h));
        return buf;
    }

    double wrap_angle(double angle)
    {
        double r = std::remainder(angle, two_pi); // [-pi, pi]
        if (r <= -std::numbers::pi)
            r += two_pi;
        return r;
    }

    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}
