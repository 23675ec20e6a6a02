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

#ifndef RISDOA_RANDOM_HPP
#define RISDOA_RANDOM_HPP

#include <cstdint>
#include <random>

namespace risdoa
{
    // Independent purposes drawing from one master seed.
    enum class Stream : std::uint32_t
    {
        signals = 1,
        ris = 2,
        angles = 3,
        spectrum = 4,
        validation = 5,
    };

    // Counter-style substream: the engine state depends only on
    // (master seed, stream, a, b), never on how many other substreams were
    // consumed before. Parallel trials therefore reproduce bit for bit.
    class Substream
    {
    public:
        Substream(std::uint64_t master_seed, Stream stream, std::uint64_t a = 0, std::uint64_t b = 0);

        std::uint64_t bits() { return engine_(); }

        // Uniform on [0, 1) with 53 random bits.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        // Standard normal (Box-Muller; one of the pair is discarded).
        double normal();

    private:
        std::mt19937_64 engine_;
    };
}

#endif
