// SPDX-License-Identifier: Apache-2.0
//
// aerothz c++ library for THz UM-MIMO aeronautical channel estimation and tracking
// Copyright (C) 2026 The aerothz authors
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


#include <aerothz/harness.hpp>

#include <benchmark/benchmark.h>

using namespace aerothz;

namespace
{
    ArrayGeometry paper_array()
    {
        return ArrayGeometry{}; // 200 x 200, 2048 subcarriers
    }

    CMat noisy_grid(int rows, int cols, Rng &rng)
    {
        CMat Y(rows, cols);
        for (Eigen::Index t = 0; t < Y.cols(); ++t)
            for (Eigen::Index m = 0; m < Y.rows(); ++m)
                Y(m, t) = std::polar(1.0, 0.7 * double(m)) + complex_normal(rng, 0.1);
        return Y;
    }
}

static void BM_RampDot(benchmark::State &state)
{
    ArrayGeometry g = paper_array();
    UpaVector a = steering_upa_ramp({1.1, -0.4}, g.n_h, g.n_v);
    UpaVector b = squint_upa_ramp({1.05, -0.38}, 17, g).hadamard(gttdu({1.0, -0.4}, g, {5, 5}, 17).conj());
    for (auto _ : state)
        benchmark::DoNotOptimize(a.dot(b));
}
BENCHMARK(BM_RampDot);

static void BM_DenseDot(benchmark::State &state)
{
    ArrayGeometry g = paper_array();
    CVec a = steering_upa({1.1, -0.4}, g.n_h, g.n_v);
    CVec b = squint_upa({1.05, -0.38}, 17, g);
    for (auto _ : state)
        benchmark::DoNotOptimize(a.dot(b));
}
BENCHMARK(BM_DenseDot);

static void BM_SelectionResponse(benchmark::State &state)
{
    ArrayGeometry g = paper_array();
    PatternSpec pat{5, 5, int(state.range(0))};
    UpaVector x = array_response({1.1, -0.4}, 17, g, ChannelOptions{});
    for (auto _ : state)
        benchmark::DoNotOptimize(selection_response(pat, {1.05, -0.38}, g, full_block(g), x));
}
BENCHMARK(BM_SelectionResponse)->Arg(1)->Arg(4);

static void BM_UnitaryEsprit2d(benchmark::State &state)
{
    Rng rng = make_rng(1);
    CMat Y = noisy_grid(25, int(state.range(0)), rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(unitary_esprit_2d(Y, 5, 5));
}
BENCHMARK(BM_UnitaryEsprit2d)->Arg(64)->Arg(1024);

static void BM_DelayEsprit(benchmark::State &state)
{
    Rng rng = make_rng(2);
    CMat Y = noisy_grid(1024, 10, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(tls_esprit(Y, 1));
}
BENCHMARK(BM_DelayEsprit);

static void BM_ViterbiSymbol(benchmark::State &state)
{
    SymbolCodec codec(2048, 7);
    Rng rng = make_rng(3);
    Bits info(codec.info_bits());
    for (auto &b : info)
        b = std::uint8_t(rng() & 1u);
    CVec x = codec.encode(info);
    for (auto _ : state)
        benchmark::DoNotOptimize(codec.decode(x));
}
BENCHMARK(BM_ViterbiSymbol);

static void BM_EstimateLinks(benchmark::State &state)
{
    ExperimentConfig cfg;
    PipelineConfig pc = cfg.pipeline(Variant{"gttdu", TtduMode::grouped});
    Rng rng = make_rng(4);
    std::vector<LinkParams> truth = scenario_links(cfg.scenario, pc.sys.bs, rng);
    std::vector<RoughEstimate> priors;
    for (const LinkParams &lp : truth)
        priors.push_back(draw_rough(lp, rng, 0.25));
    StageSnr snr = StageSnr::all(10.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_links(pc, truth, priors, snr, rng));
}
BENCHMARK(BM_EstimateLinks)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
