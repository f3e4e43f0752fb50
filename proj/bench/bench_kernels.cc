// Copyright 2026 The bellq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "bellq/decoder.h"

using namespace bellq;

namespace {

const CssCode &surface13() {
    static CssCode c = hgp(repetition_code(3), repetition_code(3));
    return c;
}

const CssCode &hgp225() {
    static CssCode c = [] {
        auto t = sample_tanner_graph(12, 3, 4, 1000, 2);
        return hgp(t.h, t.h);
    }();
    return c;
}

const NoisyCircuit &memory13() {
    static NoisyCircuit c = build_memory_experiment(surface13(), Basis::Z, 14, 3, FoldedNoise::effective(0.05, 0.002));
    return c;
}

const DetectorModel &model13() {
    static DetectorModel m = build_detector_model(memory13());
    return m;
}

void BM_SampleModel(benchmark::State &state) {
    const bool parallel = state.range(0);
    for (auto _ : state) {
        auto b = parallel ? sample_model(model13(), 4096, 1) : sample_model_serial(model13(), 4096, 1);
        benchmark::DoNotOptimize(b.det.data());
    }
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_SampleModel)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampleCircuit(benchmark::State &state) {
    const bool parallel = state.range(0);
    for (auto _ : state) {
        auto b = parallel ? sample_circuit(memory13(), 4096, 1, NoiseMode::Categorical)
                          : sample_circuit_serial(memory13(), 4096, 1, NoiseMode::Categorical);
        benchmark::DoNotOptimize(b.det.data());
    }
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_SampleCircuit)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DecodeBatch(benchmark::State &state) {
    const bool parallel = state.range(0);
    static WindowedDecoder dec(model13(), 14, 3, BpConfig{}, OsdConfig{});
    static ShotBatch batch = sample_model(model13(), 256, 2);
    for (auto _ : state) {
        auto s = parallel ? decode_batch(dec, model13(), batch) : decode_batch_serial(dec, model13(), batch);
        benchmark::DoNotOptimize(s.failures);
    }
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_DecodeBatch)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExactDistance(benchmark::State &state) {
    const bool parallel = state.range(0);
    const CssCode &c = hgp225();
    for (auto _ : state) {
        bool complete = true;
        auto d = exact_logical_weight(c.hx, c.lx, 6, 200'000'000, &complete, parallel);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_ExactDistance)->ArgName("omp")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DetectorModel(benchmark::State &state) {
    for (auto _ : state) {
        auto m = build_detector_model(memory13());
        benchmark::DoNotOptimize(m.n_mechanisms());
    }
}
BENCHMARK(BM_DetectorModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
