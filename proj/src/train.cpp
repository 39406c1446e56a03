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
#include "qvr/train.hpp"

#include "qvr/error.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <numeric>
#include <random>
#include <string>

namespace qvr {

namespace {
constexpr std::uint64_t kReferenceTag = 0x7265667ULL;
constexpr std::uint64_t kRestartTag = 0x72737472ULL;
} // namespace

void TrainConfig::validate(const Dataset &data) const {
    if (data.empty()) {
        throw ConfigError("training set is empty");
    }
    if (batch_series < 1 || batch_series > data.size()) {
        throw ConfigError("N_X must be in [1, " + std::to_string(data.size()) + "], got " +
                          std::to_string(batch_series));
    }
    if (batch_times < 1 || batch_times > data.points()) {
        throw ConfigError("N_T must be in [1, " + std::to_string(data.points()) + "], got " +
                          std::to_string(batch_times));
    }
    if (draws < 1 || ref_draws < 1) {
        throw ConfigError("N_E must be >= 1");
    }
    if (!(tau >= 0.0)) {
        throw ConfigError("tau must be >= 0");
    }
    if (layers < 1) {
        throw ConfigError("layers must be >= 1");
    }
    if (restarts < 1) {
        throw ConfigError("restarts must be >= 1");
    }
    if (data.features() > qubits) {
        throw ConfigError("data has " + std::to_string(data.features()) +
                          " features but the model has only " + std::to_string(qubits) +
                          " qubits");
    }
    auto check = [](const UniformRange &r, const char *what) {
        if (!(r.lo <= r.hi)) {
            throw ConfigError(std::string("init range for ") + what + " has lo > hi");
        }
    };
    check(init.alpha, "alpha");
    check(init.mu, "mu");
    check(init.sigma, "sigma");
    check(init.eta0, "eta0");
}

std::uint64_t restart_seed(std::uint64_t base_seed, std::size_t restart) {
    return derive_seed(base_seed, {kRestartTag, restart});
}

DrawStream reference_stream(std::uint64_t base_seed) {
    return DrawStream(derive_seed(base_seed, {kReferenceTag}));
}

ModelParams initial_params(const ModelContext &ctx, const InitRanges &init, Rng &rng) {
    auto uniform = [&rng](const UniformRange &r) {
        return r.lo == r.hi ? r.lo : std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
    };
    ModelParams p(ctx);
    for (auto &a : p.alpha.angles()) {
        a = uniform(init.alpha);
    }
    for (auto &m : p.mu) {
        m = uniform(init.mu);
    }
    for (auto &s : p.sigma) {
        s = uniform(init.sigma);
    }
    p.eta0 = uniform(init.eta0);
    return p;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    Rng &rng) {
    if (count > population) {
        throw ArgumentError("cannot draw more indices than the population size");
    }
    // Partial Fisher-Yates.
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, population - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    return idx;
}

TrainResult train(const Dataset &data, const TrainConfig &cfg, const OptimizerSpec &opt,
                  std::size_t restart, ExecPolicy policy) {
    cfg.validate(data);
    opt.validate();
    const ModelContext ctx(EmbeddingSpec{data.features(), cfg.qubits}, cfg.layers,
                           cfg.cost_scale);
    const std::uint64_t seed = restart_seed(cfg.base_seed, restart);
    Rng rng(seed);
    const ModelParams start = initial_params(ctx, cfg.init, rng);

    CostBatch batch;
    batch.draws = cfg.draws;
    Objective objective = [&](std::span<const double> flat) {
        const ModelParams theta = ModelParams::unflatten(flat, ctx);
        batch.series = sample_without_replacement(data.size(), cfg.batch_series, rng);
        batch.times = sample_without_replacement(data.points(), cfg.batch_times, rng);
        const DrawStream stream(rng());
        return cost_compiled(data, batch, CompiledModel(theta, ctx), cfg.tau, stream, policy);
    };

    OptimizeResult opt_result = minimize(objective, start.flatten(), opt);

    TrainResult result;
    result.budget_exhausted = opt_result.budget_exhausted;
    TrainedModel &m = result.model;
    m.context = ctx;
    m.params = ModelParams::unflatten(opt_result.x, ctx);
    m.params.eta0 = m.params.eta0_clamped();
    m.tau = cfg.tau;
    m.ref_draws = cfg.ref_draws;
    m.seed = seed;
    m.ref_penalty = penalty(m.params.sigma, cfg.tau);
    m.ref_cost = full_cost(data, m.params, ctx, cfg.tau, cfg.ref_draws,
                           reference_stream(cfg.base_seed), policy);
    result.trace = std::move(opt_result.trace);
    return result;
}

MultiRestartResult multi_restart(const Dataset &data, const TrainConfig &cfg,
                                 const OptimizerSpec &opt) {
    cfg.validate(data);
    opt.validate();
    MultiRestartResult out;
    out.runs.resize(cfg.restarts);
    const auto restarts = static_cast<long long>(cfg.restarts);
    // One restart per worker; kernels inside a restart stay serial to avoid
    // nested thread teams.
    const ExecPolicy inner = cfg.restarts > 1 ? ExecPolicy::Serial : ExecPolicy::Parallel;
    std::vector<std::exception_ptr> errors(cfg.restarts);
#pragma omp parallel for schedule(dynamic, 1) if (cfg.restarts > 1)
    for (long long r = 0; r < restarts; ++r) {
        const auto u = static_cast<std::size_t>(r);
        try {
            out.runs[u] = train(data, cfg, opt, u, inner);
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    for (std::size_t r = 1; r < out.runs.size(); ++r) {
        if (out.runs[r].model.ref_cost < out.runs[out.best].model.ref_cost) {
            out.best = r;
        }
    }
    return out;
}

} // namespace qvr
