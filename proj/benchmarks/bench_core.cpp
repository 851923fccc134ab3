// SPDX-License-Identifier: Apache-2.0
//
// cfris - joint time-delay and RIS precoding for wideband THz cell-free MIMO
// Copyright (C) 2026 The cfris authors
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

#include "cfris/ao_optimizer.hpp"
#include "cfris/config_io.hpp"
#include "cfris/scenario.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace cfris;

namespace
{
    // Full-scale network with its precoder; the model points into the other members
    struct Network
    {
        SystemConfig cfg;
        ChannelRealization channels;
        AnalogPrecoder precoder;
        LinkModel model;
        PrecoderVariables init;

        explicit Network(const ConfigDocument &doc, std::uint64_t seed = 7)
            : cfg(doc.system), channels(make_channels(doc, seed)),
              precoder(scheme_precoder(cfg, SchemeSpec{}, channels)),
              model(channels, precoder, cfg.ue_weights(), cfg.noise_w(), cfg.power_budget_w())
        {
            std::mt19937_64 rng(seed);
            init = random_initialization(model, 0, rng);
        }

        static ChannelRealization make_channels(const ConfigDocument &doc, std::uint64_t seed)
        {
            std::mt19937_64 rng(seed);
            return generate_scenario(doc.system, doc.geometry, rng);
        }
    };

    const Network &full_network()
    {
        static const Network net(default_config());
        return net;
    }
}

static void BM_UlaResponse(benchmark::State &state)
{
    const UlaGeometry g(int(state.range(0)));
    double phi = 0.1;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(ula_arv(phi, 1.02, g));
        phi += 1e-6;
    }
}
BENCHMARK(BM_UlaResponse)->Arg(16)->Arg(256);

static void BM_UpaResponse(benchmark::State &state)
{
    const int n = int(state.range(0));
    const UpaGeometry g(n, n);
    for (auto _ : state)
        benchmark::DoNotOptimize(upa_arv(0.3, 0.2, 1.02, g));
}
BENCHMARK(BM_UpaResponse)->Arg(8)->Arg(16);

static void BM_GenerateScenario(benchmark::State &state)
{
    const ConfigDocument doc = default_config();
    std::uint64_t seed = 1;
    for (auto _ : state)
    {
        std::mt19937_64 rng(seed++);
        benchmark::DoNotOptimize(generate_scenario(doc.system, doc.geometry, rng));
    }
}
BENCHMARK(BM_GenerateScenario)->Unit(benchmark::kMicrosecond);

static void BM_Wsr(benchmark::State &state)
{
    const Network &net = full_network();
    for (auto _ : state)
        benchmark::DoNotOptimize(wsr(net.model, net.init));
}
BENCHMARK(BM_Wsr)->Unit(benchmark::kMicrosecond);

static void BM_BuildSubproblem(benchmark::State &state)
{
    const Network &net = full_network();
    const UeScReal vs = compute_varsigma(net.model, update_rho(net.model, net.init));
    const UeScComplex aux = update_auxiliary(net.model, net.init, vs);
    const int block = int(state.range(0));
    for (auto _ : state)
    {
        if (block == 0)
            benchmark::DoNotOptimize(build_w_subproblem(net.model, net.init.ris, aux, vs));
        else if (block == 1)
            benchmark::DoNotOptimize(build_theta_subproblem(net.model, net.init, aux, vs));
        else
            benchmark::DoNotOptimize(build_t_subproblem(net.model, net.init, aux, vs));
    }
}
BENCHMARK(BM_BuildSubproblem)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_SolvePds(benchmark::State &state)
{
    const Network &net = full_network();
    const UeScReal vs = compute_varsigma(net.model, update_rho(net.model, net.init));
    const UeScComplex aux = update_auxiliary(net.model, net.init, vs);
    const bool baseband = state.range(0) == 0;
    const QuadraticSubproblem p = baseband ? build_w_subproblem(net.model, net.init.ris, aux, vs)
                                           : build_theta_subproblem(net.model, net.init, aux, vs);
    const CVec x0 = baseband ? net.init.w : net.init.ris.theta;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_pds(p, x0));
}
BENCHMARK(BM_SolvePds)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_RunAo(benchmark::State &state)
{
    const Network &net = full_network();
    AoOptions opts = scheme_options(net.cfg, SchemeSpec{});
    opts.max_iterations = int(state.range(0));
    opts.tolerance = 1e-12;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_ao(net.model, net.init, opts));
}
BENCHMARK(BM_RunAo)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
