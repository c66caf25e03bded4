/*
 Copyright 2026 The cloudmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "cloudmpc/config.hpp"
#include "cloudmpc/conic.hpp"
#include "cloudmpc/sim.hpp"

#include <benchmark/benchmark.h>

#include <limits>

using namespace cloudmpc;

namespace {

const Scenario& example1()
{
    static const Scenario sc = build_scenario(preset_config("example1"));
    return sc;
}

/// Random-free LP: minimise sum(z) over a chain z_{i+1} >= z_i + 1 inside a box.
ConicProgram chain_lp(int n)
{
    ConicProgram p;
    p.c = Vector::Ones(n);
    p.A = Matrix::Zero(n - 1, n);
    p.b = Vector::Constant(n - 1, -1.0);
    for (int i = 0; i + 1 < n; ++i) {
        p.A(i, i) = 1.0;
        p.A(i, i + 1) = -1.0;
    }
    p.lower = Vector::Constant(n, -100.0);
    p.upper = Vector::Constant(n, 100.0);
    return p;
}

void BM_ConicChainLP(benchmark::State& state)
{
    const ConicProgram p = chain_lp(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_conic(p));
}
BENCHMARK(BM_ConicChainLP)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Example1CloudSolve(benchmark::State& state)
{
    const Scenario& sc = example1();
    const Vector x_hat0 = sc.initial_state + *sc.injected_error;
    for (auto _ : state) benchmark::DoNotOptimize(solve_cloud(sc.setup, x_hat0, 0.5));
}
BENCHMARK(BM_Example1CloudSolve)->Unit(benchmark::kMillisecond);

void BM_Example1LocalSolve(benchmark::State& state)
{
    const Scenario& sc = example1();
    for (auto _ : state) benchmark::DoNotOptimize(solve_local(sc.setup, 0, sc.initial_state, nullptr));
}
BENCHMARK(BM_Example1LocalSolve)->Unit(benchmark::kMillisecond);

void BM_Example1ClosedLoop(benchmark::State& state)
{
    const Scenario& sc = example1();
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_closed_loop(sc, RunMode::Fused, seed++));
}
BENCHMARK(BM_Example1ClosedLoop)->Unit(benchmark::kMillisecond);

void BM_CloudCostBound(benchmark::State& state)
{
    const BoundContext ctx = example1().setup.context();
    for (auto _ : state) benchmark::DoNotOptimize(cloud_cost_bound(ctx, 0.5, 0));
}
BENCHMARK(BM_CloudCostBound);

} // namespace

BENCHMARK_MAIN();
