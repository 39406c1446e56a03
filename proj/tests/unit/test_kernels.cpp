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
#include "dense_oracle.hpp"
#include "doctest.h"

#include "qvr/error.hpp"
#include "qvr/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qvr;

namespace {

ModelParams random_params(const ModelContext &ctx, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> sym(-1.5, 1.5);
    std::uniform_real_distribution<double> pos(0.0, 1.0);
    ModelParams p(ctx);
    for (auto &a : p.alpha.angles()) {
        a = ang(rng);
    }
    for (auto &m : p.mu) {
        m = sym(rng);
    }
    for (auto &s : p.sigma) {
        s = pos(rng);
    }
    p.eta0 = sym(rng);
    return p;
}

Dataset random_dataset(std::size_t m, std::size_t p, std::size_t d, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    Dataset data;
    data.name = "rand";
    for (std::size_t i = 0; i < m; ++i) {
        TimeSeries s;
        s.id = "s" + std::to_string(i);
        s.features = d;
        for (std::size_t j = 0; j < p; ++j) {
            s.times.push_back(0.5 * static_cast<double>(j));
            for (std::size_t f = 0; f < d; ++f) {
                s.values.push_back(u(rng));
            }
        }
        data.series.push_back(std::move(s));
    }
    return data;
}

} // namespace

TEST_CASE("dense_w is the unitary of the gate sequence") {
    std::mt19937_64 rng(1);
    for (std::size_t n = 1; n <= 3; ++n) {
        const ModelContext ctx({n, n}, 3);
        const ModelParams p = random_params(ctx, rng);
        const std::vector<Complex> w = dense_w(p.alpha);
        const oracle::Mat ref = oracle::w_matrix(p.alpha);
        const std::size_t dim = std::size_t{1} << n;
        REQUIRE(w.size() == dim * dim);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                CHECK(std::abs(w[r * dim + c] -
                               ref(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("property: compiled omega matches the gate-level path") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
        const std::size_t d = 1 + static_cast<std::size_t>(rng() % n);
        const ModelContext ctx({d, n}, 1 + rng() % 3);
        const ModelParams p = random_params(ctx, rng);
        const CompiledModel cm(p, ctx);
        auto ws = cm.workspace();
        std::vector<double> x(d), eps(ctx.terms());
        for (auto &v : x) {
            v = u(rng);
        }
        for (auto &v : eps) {
            v = u(rng);
        }
        const double t = 5 * u(rng);
        REQUIRE(std::abs(cm.omega(x, t, eps, ws) - omega(x, t, p, ctx, eps)) < 1e-11);
    }
}

TEST_CASE("compiled c1, c2 and cost agree with the reference") {
    std::mt19937_64 rng(3);
    for (std::size_t n = 1; n <= 3; ++n) {
        const ModelContext ctx({n, n}, 2);
        const ModelParams p = random_params(ctx, rng);
        const CompiledModel cm(p, ctx);
        const Dataset data = random_dataset(6, 9, n, rng);
        const DrawStream s(40 + n);
        const auto &x = data.series[2];
        CHECK(cm.c1(x.point(3), x.times[3], 7, s) ==
              doctest::Approx(c1(x.point(3), x.times[3], p, ctx, 7, s)).epsilon(1e-12));
        const std::vector<std::size_t> times{1, 4, 8};
        CHECK(cm.c2(x, times, 7, s) == doctest::Approx(c2(x, times, p, ctx, 7, s)).epsilon(1e-12));
        const CostBatch batch{{0, 3, 5}, {0, 2, 6, 7}, 5};
        CHECK(cost_compiled(data, batch, cm, 2.0, s) ==
              doctest::Approx(cost(data, batch, p, ctx, 2.0, s)).epsilon(1e-12));
    }
}

TEST_CASE("property: parallel results are bit-identical for every thread count") {
    std::mt19937_64 rng(4);
    const ModelContext ctx({2, 2}, 3);
    const ModelParams p = random_params(ctx, rng);
    const CompiledModel cm(p, ctx);
    const Dataset data = random_dataset(20, 15, 2, rng);
    const DrawStream s(5);
    const CostBatch batch{{0, 2, 4, 6, 8, 10, 12, 14, 16, 18}, {0, 3, 6, 9, 12}, 10};
    const double serial = cost_compiled(data, batch, cm, 5.0, s, ExecPolicy::Serial);
    const int saved = omp_get_max_threads();
    for (const int threads : {1, 2, 3, 4, 8}) {
        omp_set_num_threads(threads);
        CHECK(cost_compiled(data, batch, cm, 5.0, s, ExecPolicy::Parallel) == serial);
    }
    omp_set_num_threads(saved);
}

TEST_CASE("score_dataset matches per-series anomaly scores") {
    std::mt19937_64 rng(5);
    const ModelContext ctx({1, 2}, 2);
    TrainedModel m;
    m.context = ctx;
    m.params = random_params(ctx, rng);
    m.ref_cost = 0.25;
    m.ref_penalty = 0.05;
    const Dataset data = random_dataset(8, 6, 1, rng);
    const DrawStream s(6);
    const auto scores = score_dataset(m, data, 9, s);
    REQUIRE(scores.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(scores[i] >= 0.0);
        CHECK(scores[i] == doctest::Approx(anomaly_score(data.series[i], m, full_time_batch(6), 9,
                                                         s.for_series(i)))
                               .epsilon(1e-12));
    }
    CHECK(score_dataset(m, Dataset{}, 9, s).empty());
    CHECK(score_dataset(m, data, 9, s, ExecPolicy::Serial) == scores);
}

TEST_CASE("full_cost covers every series and time point") {
    std::mt19937_64 rng(7);
    const ModelContext ctx({1, 2}, 1);
    const ModelParams p = random_params(ctx, rng);
    const Dataset data = random_dataset(5, 4, 1, rng);
    const DrawStream s(8);
    const CostBatch all{{0, 1, 2, 3, 4}, {0, 1, 2, 3}, 10};
    CHECK(full_cost(data, p, ctx, 5.0, 10, s) ==
          doctest::Approx(cost(data, all, p, ctx, 5.0, s)).epsilon(1e-12));
}

TEST_CASE("kernel argument errors") {
    std::mt19937_64 rng(9);
    const ModelContext ctx({1, 2}, 1);
    const CompiledModel cm(random_params(ctx, rng), ctx);
    const Dataset data = random_dataset(3, 4, 1, rng);
    const std::vector<std::size_t> idx{0, 1};
    const std::vector<std::size_t> times{0, 1};
    CHECK_THROWS_AS((void)c2_batch(cm, data, idx, times, 0, DrawStream(1)), ArgumentError);
    CHECK_THROWS_AS((void)c2_batch(cm, data, idx, std::vector<std::size_t>{}, 1, DrawStream(1)),
                    ArgumentError);
    CHECK_THROWS_AS((void)c2_batch(cm, data, std::vector<std::size_t>{3}, times, 1, DrawStream(1)),
                    IndexError);
    CHECK_THROWS_AS((void)c2_batch(cm, data, idx, std::vector<std::size_t>{4}, 1, DrawStream(1)),
                    IndexError);
    const Dataset wide = random_dataset(2, 4, 2, rng);
    CHECK_THROWS_AS((void)c2_batch(cm, wide, idx, times, 1, DrawStream(1)), ArgumentError);
}
