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

#include "risdoa/random.hpp"

#include <cmath>
#include <numbers>

namespace risdoa
{
    namespace
    {
        std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
        std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }
    }

    Substream::Substream(std::uint64_t master_seed, Stream stream, std::uint64_t a, std::uint64_t b)
    {
        std::seed_seq seq{lo32(master_seed), hi32(master_seed), static_cast<std::uint32_t>(stream),
                          lo32(a), hi32(a), lo32(b), hi32(b)};
        engine_.seed(seq);
    }

    double Substream::normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
}
