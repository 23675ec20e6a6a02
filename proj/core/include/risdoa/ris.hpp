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

#ifndef RISDOA_RIS_HPP
#define RISDOA_RIS_HPP

#include "risdoa/geometry.hpp"
#include "risdoa/random.hpp"
#include "risdoa/scenario.hpp"

#include <cstdint>

namespace risdoa
{
    // e1 = E[w w*], e2 = |E[w]|^2. Diagonal and off-diagonal of Sigma = E[w w^H].
    struct Moments
    {
        double e1 = 0.0;
        double e2 = 0.0;
    };

    Moments ris_moments(const RisDistribution &dist);

    // E[w] in closed form.
    std::complex<double> ris_mean(const RisDistribution &dist);

    CVector sample_ris(const RisDistribution &dist, std::size_t n, Substream &rng);
    CVector sample_ris(const RisDistribution &dist, std::size_t n, std::uint64_t seed);

    // N x N: e1 on the diagonal, e2 elsewhere.
    CMatrix sigma_matrix(const RisDistribution &dist, std::size_t n);
}

#endif
