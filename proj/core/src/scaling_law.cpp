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

#include "risdoa/scaling_law.hpp"
#include "risdoa/errors.hpp"
#include "risdoa/ris.hpp"

#include <cmath>
#include <limits>

namespace risdoa
{
    std::string to_string(Regime regime) { return regime == Regime::symmetric ? "symmetric" : "non-symmetric"; }

    std::vector<AsymptoticRegime> detect_regime(const Scenario &s, double tol)
    {
        require(tol >= 0.0, "detect_regime: tolerance must be non-negative");
        std::vector<AsymptoticRegime> out(s.thetas.size());
        for (std::size_t i = 0; i < s.thetas.size(); ++i)
        {
            for (std::size_t r = 0; r < s.phis.size(); ++r)
            {
                if (std::abs(wrap_angle(s.thetas[i] + s.phis[r])) <= tol)
                {
                    out[i] = {Regime::symmetric, r};
                    break;
                }
            }
        }
        return out;
    }

    double asymptotic_fisher_entry(std::size_t i, const Scenario &s, const AsymptoticRegime &regime)
    {
        validate(s);
        require(i < s.num_targets(), "asymptotic_fisher_entry: target index out of range");
        const Moments m = ris_moments(s.ris);
        const double n = static_cast<double>(s.n_elements);
        const double t = static_cast<double>(s.n_slots);
        const double rho = s.snr(i);

        if (regime.tag == Regime::symmetric)
        {
            if (m.e2 == 0.0)
                throw DegenerateRegimeError("symmetric regime with e2 = 0: the N^4 term vanishes");
            return rho * (t * m.e2 / 2.0) * (n * n * n * n);
        }
        const double r = static_cast<double>(s.num_sensors());
        return rho * (2.0 * t * (m.e1 - m.e2) * r / 3.0) * (n * n * n);
    }

    double asymptotic_crb_entry(std::size_t i, const Scenario &s, const AsymptoticRegime &regime)
    {
        require(s.signal_model == SignalModel::uncorrelated_diagonal,
                "asymptotic_crb_entry: closed form holds for uncorrelated signals only");
        const double f = asymptotic_fisher_entry(i, s, regime);
        if (f == 0.0)
            throw DegenerateRegimeError("non-symmetric regime with e1 = e2: the N^3 term vanishes");
        return 1.0 / f;
    }

    double cosine_sum_leading(double psi, std::size_t n)
    {
        const double half = std::sin(wrap_angle(psi) / 2.0);
        if (half == 0.0 || std::abs(wrap_angle(psi)) < std::numeric_limits<double>::epsilon())
            throw PreconditionError("cosine_sum_leading: psi = 0 mod 2pi; use square_sum()");
        const double nn = static_cast<double>(n);
        return nn * nn / (4.0 * half * half);
    }

    double square_sum(std::size_t n)
    {
        if (n == 0)
            return 0.0;
        const double nn = static_cast<double>(n);
        return (nn - 1.0) * nn * (2.0 * nn - 1.0) / 6.0;
    }
}
