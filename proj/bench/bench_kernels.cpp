// Copyright 2026 The QVR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qvr/data.hpp"
#include "qvr/kernels.hpp"
#include "qvr/model.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numbers>
#include <random>

using namespace qvr;

namespace {

struct Fixture {
    ModelContext ctx;
    ModelParams params;
    Dataset data;
    CostBatch batch;

    Fixture(std::size_t qubits, std::size_t series, std::size_t draws)
        : ctx({qubits, qubits}, 3), params(ctx),
          data(gen_gaussian(series, 50, 0.1, 1234, "X")) {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
        for (auto &a : params.alpha.angles()) {
            a = ang(rng);
        }
        for (auto &m : params.mu) {
            m = ang(rng) - std::numbers::pi;
        }
        for (auto &s : params.sigma) {
            s = 0.3;
        }
        params.eta0 = 0.2;
        if (qubits > 1) {
            // Widen the data to `qubits` features by repeating the first one.
            for (auto &s : data.series) {
                std::vector<double> v;
                for (double x : s.values) {
                    v.insert(v.end(), qubits, x);
                }
                s.values = std::move(v);
                s.features = qubits;
            }
        }
        for (std::size_t i = 0; i < series; ++i) {
            batch.series.push_back(i);
        }
        batch.times = full_time_batch(50);
        batch.draws = draws;
    }
};

void BM_CostReference(benchmark::State &state) {
    const Fixture f(static_cast<std::size_t>(state.range(0)), 10, 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost(f.data, f.batch, f.params, f.ctx, 5.0, DrawStream(7)));
    }
}

void BM_CostSerial(benchmark::State &state) {
    const Fixture f(static_cast<std::size_t>(state.range(0)), 10, 10);
    const CompiledModel model(f.params, f.ctx);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cost_compiled(f.data, f.batch, model, 5.0, DrawStream(7), ExecPolicy::Serial));
    }
}

void BM_CostParallel(benchmark::State &state) {
    const Fixture f(static_cast<std::size_t>(state.range(0)), 10, 10);
    const CompiledModel model(f.params, f.ctx);
    state.counters["threads"] = omp_get_max_threads();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cost_compiled(f.data, f.batch, model, 5.0, DrawStream(7), ExecPolicy::Parallel));
    }
}

} // namespace

BENCHMARK(BM_CostReference)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostSerial)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostParallel)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
