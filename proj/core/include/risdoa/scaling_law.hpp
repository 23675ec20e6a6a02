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

#ifndef RISDOA_SCALING_LAW_HPP
#define RISDOA_SCALING_LAW_HPP

#include "risdoa/scenario.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace risdoa
{
    enum class Regime
    {
        symmetric,    // some sensor satisfies theta_i + phi_r = 0 (mod 2pi): CRB ~ N^-4
        non_symmetric // no such sensor: CRB ~ N^-3
    };

    std::string to_string(Regime regime);

    struct AsymptoticRegime
    {
        Regime tag = Regime::non_symmetric;
        std::optional<std::size_t> matched_sensor; // first matching r when symmetric
    };

    inline constexpr double default_symmetry_tolerance = 1e-9;

    // One entry per target; symmetric iff min_r |wrap(theta_i + phi_r)| <= tol.
    std::vector<AsymptoticRegime> detect_regime(const Scenario &scenario,
                                                double tol = default_symmetry_tolerance);

    // Leading-order F_ii for large N:
    //   symmetric:     rho_i * T * e2 / 2 * N^4
    //   non-symmetric: rho_i * 2 T (e1 - e2) R / 3 * N^3
    // A symmetric target with e2 = 0 has no N^4 term and raises DegenerateRegimeError.
    double asymptotic_fisher_entry(std::size_t i, const Scenario &scenario, const AsymptoticRegime &regime);

    // Leading-order CRB_ii = 1 / asymptotic_fisher_entry for uncorrelated signals:
    //   symmetric:     2 / (rho_i T e2) * N^-4
    //   non-symmetric: 3 / (2 T rho_i (e1 - e2) R) * N^-3
    double asymptotic_crb_entry(std::size_t i, const Scenario &scenario, const AsymptoticRegime &regime);

    // Leading term N^2 / (4 sin^2(psi/2)) of sum_{n1,n2=1}^{N-1} n1 n2 cos((n2 - n1) psi), psi != 0 mod 2pi.
    double cosine_sum_leading(double psi, std::size_t n);

    // sum_{k=1}^{n-1} k^2 = (n-1) n (2n-1) / 6, the psi = 0 branch.
    double square_sum(std::size_t n);
}

#endif
