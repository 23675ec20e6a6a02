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

#include "risdoa/spectrum.hpp"

#include <benchmark/benchmark.h>

using namespace risdoa;

namespace
{
    const SpectralModel unit{0.3, 0.35, ConstantModulus{}};
    const SpectralModel amplitude{0.3, 0.35, DiscreteAmplitude{1.0, 3.0, 0.5}};

    void BM_StieltjesQuadratic(benchmark::State &state)
    {
        double re = 0.0;
        for (auto _ : state)
        {
            benchmark::DoNotOptimize(stieltjes_constant_modulus(Complex(re, 1e-6), unit));
            re = re > 0.3 ? 0.0 : re + 1e-4;
        }
    }
    BENCHMARK(BM_StieltjesQuadratic);

    // Cold start: full vertical continuation per point.
    void BM_StieltjesQuinticCold(benchmark::State &state)
    {
        double re = 0.0;
        for (auto _ : state)
        {
            benchmark::DoNotOptimize(stieltjes_discrete_amplitude(Complex(re, 1e-6), amplitude));
            re = re > 1.9 ? 0.0 : re + 1e-3;
        }
    }
    BENCHMARK(BM_StieltjesQuinticCold);

    void BM_DensityCurve(benchmark::State &state)
    {
        const SpectralModel &model = state.range(0) == 0 ? unit : amplitude;
        for (auto _ : state)
            benchmark::DoNotOptimize(density_curve(model, GridSpec{0.0, 0.0, 2001}));
    }
    BENCHMARK(BM_DensityCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

    void BM_EmpiricalSpectrum(benchmark::State &state)
    {
        const Scenario s = spectral_scenario(unit, static_cast<std::size_t>(state.range(0)));
        for (auto _ : state)
            benchmark::DoNotOptimize(empirical_spectrum(s, 1, 2.0));
    }
    BENCHMARK(BM_EmpiricalSpectrum)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
}

BENCHMARK_MAIN();
