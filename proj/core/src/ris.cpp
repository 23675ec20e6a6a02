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

#include "risdoa/ris.hpp"
#include "risdoa/errors.hpp"

#include <cmath>
#include <numbers>

namespace risdoa
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        const std::complex<double> j{0.0, 1.0};
    }

    std::complex<double> ris_mean(const RisDistribution &dist)
    {
        validate(dist);
        return std::visit(
            [](const auto &d) -> std::complex<double>
            {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, UniformPhase>)
                {
                    const double width = d.phase_hi - d.phase_lo;
                    // (e^{j hi} - e^{j lo}) / (j width); the full circle is exactly zero.
                    if (width == two_pi)
                        return {0.0, 0.0};
                    return (std::polar(1.0, d.phase_hi) - std::polar(1.0, d.phase_lo)) / (j * width);
                }
                else if constexpr (std::is_same_v<T, DiscretePhase>)
                {
                    std::complex<double> m{0.0, 0.0};
                    for (std::size_t i = 0; i < d.phases.size(); ++i)
                        m += d.probs[i] * std::polar(1.0, d.phases[i]);
                    return m;
                }
                else
                {
                    return {0.0, 0.0};
                }
            },
            dist);
    }

    Moments ris_moments(const RisDistribution &dist)
    {
        const double e2 = std::norm(ris_mean(dist));
        double e1 = 1.0;
        if (const auto *amp = std::get_if<DiscreteAmplitude>(&dist))
            e1 = amp->p * amp->x * amp->x + (1.0 - amp->p) * amp->y * amp->y;
        return {e1, e2};
    }

    CVector sample_ris(const RisDistribution &dist, std::size_t n, Substream &rng)
    {
        require(n >= 1, "sample_ris: n must be >= 1");
        CVector w(static_cast<Eigen::Index>(n));
        std::visit(
            [&](const auto &d)
            {
                using T = std::decay_t<decltype(d)>;
                for (Eigen::Index i = 0; i < w.size(); ++i)
                {
                    if constexpr (std::is_same_v<T, UniformPhase>)
                    {
                        w[i] = std::polar(1.0, rng.uniform(d.phase_lo, d.phase_hi));
                    }
                    else if constexpr (std::is_same_v<T, DiscretePhase>)
                    {
                        const double u = rng.uniform();
                        std::size_t level = d.probs.size() - 1;
                        double cumulative = 0.0;
                        for (std::size_t k = 0; k < d.probs.size(); ++k)
                        {
                            cumulative += d.probs[k];
                            if (u < cumulative)
                            {
                                level = k;
                                break;
                            }
                        }
                        w[i] = std::polar(1.0, d.phases[level]);
                    }
                    else
                    {
                        const double amplitude = rng.uniform() < d.p ? d.x : d.y;
                        w[i] = std::polar(amplitude, rng.uniform(0.0, two_pi));
                    }
                }
            },
            dist);
        return w;
    }

    CVector sample_ris(const RisDistribution &dist, std::size_t n, std::uint64_t seed)
    {
        validate(dist);
        Substream rng(seed, Stream::ris);
        return sample_ris(dist, n, rng);
    }

    CMatrix sigma_matrix(const RisDistribution &dist, std::size_t n)
    {
        require(n >= 1, "sigma_matrix: n must be >= 1");
        const Moments m = ris_moments(dist);
        const auto size = static_cast<Eigen::Index>(n);
        CMatrix sigma = CMatrix::Constant(size, size, m.e2);
        sigma.diagonal().setConstant(m.e1);
        return sigma;
    }
}
