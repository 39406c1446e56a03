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
 * Sweep experiments: epsilon-draw convergence, the (mu, sigma) landscape,
 * the tau contraction grid on static data and the optimizer benchmark.
 * Each result writes a CSV table with a fixed header.
 */
#pragma once

#include "qvr/kernels.hpp"
#include "qvr/optimize.hpp"
#include "qvr/train.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qvr {

struct NeRow {
    std::size_t theta = 0;
    std::size_t n_x = 0;
    std::size_t n_e = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double pct_std = 0.0; ///< 100 * stddev / mean
    bool operator==(const NeRow &) const = default;
};

struct NeSweepConfig {
    std::vector<std::size_t> n_x{1, 10};
    std::vector<std::size_t> n_e{1, 2, 5, 10, 20, 50, 100};
    std::size_t n_t = 10;
    std::size_t repeats = 100;
    double tau = 5.0;
    std::uint64_t seed = 0;
};

/// For every (theta, N_X) one minibatch is drawn and held fixed; only the
/// epsilon draws change between the `repeats` cost evaluations.
[[nodiscard]] std::vector<NeRow> sweep_ne(const Dataset &data, const ModelContext &ctx,
                                          const std::vector<ModelParams> &thetas,
                                          const NeSweepConfig &cfg,
                                          ExecPolicy policy = ExecPolicy::Parallel);

void write_ne_table(std::ostream &out, const std::vector<NeRow> &rows);

struct MuSigmaRow {
    double mu = 0.0;
    double sigma = 0.0;
    double mean = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    bool operator==(const MuSigmaRow &) const = default;
};

struct MuSigmaConfig {
    std::vector<double> mu;
    std::vector<double> sigma{0.0, 0.1, 0.5, 1.0};
    std::size_t n_x = 5;
    std::size_t n_t = 10;
    std::size_t n_e = 10;
    std::size_t repeats = 100;
    double tau = 0.0;
    std::uint64_t seed = 0;
};

/// Scalar case: the context must have a single epsilon term. alpha and eta0
/// come from `base`; one minibatch is shared by the whole grid.
[[nodiscard]] std::vector<MuSigmaRow> sweep_mu_sigma(const Dataset &data, const ModelContext &ctx,
                                                     const ModelParams &base,
                                                     const MuSigmaConfig &cfg,
                                                     ExecPolicy policy = ExecPolicy::Parallel);

void write_mu_sigma_table(std::ostream &out, const std::vector<MuSigmaRow> &rows);

struct TauGrid {
    double tau = 0.0;
    double ref_cost = 0.0;
    double ref_penalty = 0.0;
    double area_fraction = 0.0; ///< share of grid points with score <= level
    std::size_t resolution = 0;
    std::vector<double> scores; ///< resolution x resolution, row = first feature
};

struct TauSweepConfig {
    std::vector<double> taus{0.5, 1.0, 3.0, 5.0, 6.0, 8.0, 10.0, 20.0};
    std::size_t resolution = 64; ///< grid points per axis over [0, 2pi)
    double level = 0.01;
    std::size_t score_draws = 100;
};

/// Trains one static model per tau with `train_cfg` (tau overridden) and
/// scores the feature grid at t = 1.
[[nodiscard]] std::vector<TauGrid> sweep_tau(const Dataset &blobs, const TrainConfig &train_cfg,
                                             const OptimizerSpec &opt,
                                             const TauSweepConfig &cfg);

[[nodiscard]] double grid_coordinate(std::size_t k, std::size_t resolution);

[[nodiscard]] std::vector<double> score_feature_grid(const TrainedModel &model,
                                                     std::size_t resolution, double t,
                                                     std::size_t draws,
                                                     const DrawStream &stream,
                                                     ExecPolicy policy = ExecPolicy::Parallel);

void write_tau_summary(std::ostream &out, const std::vector<TauGrid> &grids);
void write_tau_grid(std::ostream &out, const TauGrid &grid);

struct OptimizerTraces {
    Method method = Method::Powell;
    std::vector<TrainTrace> traces; ///< one per restart
};

[[nodiscard]] std::vector<OptimizerTraces> benchmark_optimizers(const Dataset &data,
                                                                const TrainConfig &cfg,
                                                                const OptimizerSpec &base,
                                                                const std::vector<Method> &methods);

/// Long format: method,restart,iteration,cost,best_cost.
void write_trace_table(std::ostream &out, const std::vector<OptimizerTraces> &runs);

struct TraceBand {
    Method method = Method::Powell;
    std::size_t iteration = 0;
    double mean = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Per-iteration distribution of the best-so-far cost across restarts.
[[nodiscard]] std::vector<TraceBand> trace_density(const std::vector<OptimizerTraces> &runs);
void write_trace_density(std::ostream &out, const std::vector<TraceBand> &bands);

/// Linear-interpolated quantile of an unsorted sample.
[[nodiscard]] double quantile(std::vector<double> values, double q);

} // namespace qvr
