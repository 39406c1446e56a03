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
/**
 * @file
 * Minibatch training of the rewinding model and multi-restart orchestration.
 */
#pragma once

#include "qvr/kernels.hpp"
#include "qvr/model.hpp"
#include "qvr/optimize.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qvr {

struct UniformRange {
    double lo = 0.0;
    double hi = 1.0;
};

/// Initial-value ranges for each parameter block.
struct InitRanges {
    UniformRange alpha{0.0, 6.283185307179586};
    UniformRange mu{-1.0, 1.0};
    UniformRange sigma{0.0, 0.5};
    UniformRange eta0{-1.0, 1.0};
};

struct TrainConfig {
    std::size_t batch_series = 5;  ///< N_X
    std::size_t batch_times = 10;  ///< N_T
    std::size_t draws = 10;        ///< N_E
    double tau = 5.0;
    std::size_t qubits = 2;
    std::size_t layers = 1;
    std::size_t restarts = 1;
    std::uint64_t base_seed = 0;
    std::size_t ref_draws = 100; ///< N_E used for the frozen reference cost
    double cost_scale = kDefaultCostScale;
    InitRanges init;

    /// Throws ConfigError when the config cannot apply to `data`.
    void validate(const Dataset &data) const;
};

struct TrainResult {
    TrainedModel model;
    TrainTrace trace;
    bool budget_exhausted = false;
};

/// Seed of restart r.
[[nodiscard]] std::uint64_t restart_seed(std::uint64_t base_seed, std::size_t restart);

/// Random initial theta drawn from cfg.init.
[[nodiscard]] ModelParams initial_params(const ModelContext &ctx, const InitRanges &init,
                                         Rng &rng);

/// Draws `count` distinct indices from [0, population).
[[nodiscard]] std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                                  std::size_t count, Rng &rng);

/**
 * @brief Runs one seeded training.
 *
 * Every objective evaluation draws a fresh (B_X, B_T) minibatch and a fresh
 * epsilon seed. Afterwards C(theta*) is recomputed over the full training set
 * and time grid with cfg.ref_draws draws from a stream shared by all restarts
 * of cfg.base_seed.
 */
[[nodiscard]] TrainResult train(const Dataset &data, const TrainConfig &cfg,
                                const OptimizerSpec &opt, std::size_t restart = 0,
                                ExecPolicy policy = ExecPolicy::Parallel);

struct MultiRestartResult {
    std::vector<TrainResult> runs;
    std::size_t best = 0; ///< index of the run with the lowest reference cost

    [[nodiscard]] const TrainedModel &best_model() const { return runs.at(best).model; }
};

/// cfg.restarts independent trainings (run in parallel); picks the lowest
/// frozen reference cost.
[[nodiscard]] MultiRestartResult multi_restart(const Dataset &data, const TrainConfig &cfg,
                                               const OptimizerSpec &opt);

/// Reference-cost stream shared by every restart of a base seed.
[[nodiscard]] DrawStream reference_stream(std::uint64_t base_seed);

} // namespace qvr
