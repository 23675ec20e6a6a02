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

#include "risdoa/fim.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace risdoa;

namespace
{
    Scenario figure_one(std::size_t n, std::size_t slots)
    {
        Scenario s;
        s.thetas = {0.4, 1.1, -2.0};
        s.phis = {-0.4, 0.7, 1.5, -1.9, 2.6};
        s.n_elements = n;
        s.n_slots = slots;
        s.powers = {1.0, 1.0, 1.0};
        s.ris = UniformPhase{0.0, std::numbers::pi};
        return s;
    }

    void BM_FimExact(benchmark::State &state)
    {
        const Scenario s = figure_one(static_cast<std::size_t>(state.range(0)), 50);
        const auto omegas = trial_omegas(s, 1, 0);
        const auto signals = scenario_signals(s, 1);
        for (auto _ : state)
            benchmark::DoNotOptimize(fim_exact(s, omegas, signals));
        state.SetComplexityN(state.range(0));
    }
    BENCHMARK(BM_FimExact)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oN);

    void BM_FimExpected(benchmark::State &state)
    {
        const Scenario s = figure_one(static_cast<std::size_t>(state.range(0)), 50);
        for (auto _ : state)
            benchmark::DoNotOptimize(fim_expected(s));
    }
    BENCHMARK(BM_FimExpected)->RangeMultiplier(4)->Range(64, 1024);

    void BM_MonteCarloCrb(benchmark::State &state)
    {
        const Scenario s = figure_one(256, 50);
        const auto workers = static_cast<unsigned>(state.range(0));
        for (auto _ : state)
            benchmark::DoNotOptimize(monte_carlo_crb(s, 50, 1, {false, workers}));
    }
    BENCHMARK(BM_MonteCarloCrb)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
}

BENCHMARK_MAIN();
