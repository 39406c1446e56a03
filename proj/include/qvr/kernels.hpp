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
 * Compiled evaluation kernels.
 *
 * CompiledModel folds W(alpha) into a dense matrix once per theta, so each
 * circuit costs two small matrix-vector products. Batch kernels spread
 * (series, draw) tasks over OpenMP threads; every task seeds its own
 * generator and partial sums are reduced in task order, so results are
 * bit-identical for any thread count and for ExecPolicy::Serial.
 */
#pragma once

#include "qvr/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qvr {

enum class ExecPolicy { Serial, Parallel };

/// Dense row-major unitary of a W(alpha) circuit, built by applying the
/// gate sequence to every basis state.
[[nodiscard]] std::vector<Complex> dense_w(const WParams &w);

class CompiledModel {
  public:
    CompiledModel(const ModelParams &params, const ModelContext &ctx);

    [[nodiscard]] const ModelParams &params() const noexcept { return params_; }
    [[nodiscard]] const ModelContext &context() const noexcept { return ctx_; }

    /// Scratch buffers for one worker.
    struct Workspace {
        std::vector<Complex> psi;
        std::vector<Complex> tmp;
        std::vector<double> eps;
        std::vector<double> phases;
    };
    [[nodiscard]] Workspace workspace() const;

    [[nodiscard]] double omega(std::span<const double> x_t, double t,
                               std::span<const double> eps, Workspace &ws) const;

    [[nodiscard]] double c1(std::span<const double> x_t, double t, std::size_t draws,
                            const DrawStream &stream) const;

    /// Mean over the time batch of Omega^2 for epsilon draw `draw` (not yet
    /// divided by L).
    [[nodiscard]] double draw_term(const TimeSeries &x, std::span<const std::size_t> times,
                                   const DrawStream &stream, std::size_t draw,
                                   Workspace &ws) const;

    [[nodiscard]] double c2(const TimeSeries &x, std::span<const std::size_t> times,
                            std::size_t draws, const DrawStream &stream) const;

  private:
    ModelParams params_;
    ModelContext ctx_;
    std::vector<Complex> w_;   // dim x dim
    std::vector<Complex> wdg_; // W^dagger
    std::vector<double> zbar_; // mean z per basis state
    double eta0_ = 0.0;
};

/// C2 of each series in `series` (dataset indices). Series i draws from
/// stream.for_series(i).
[[nodiscard]] std::vector<double> c2_batch(const CompiledModel &model, const Dataset &data,
                                           std::span<const std::size_t> series,
                                           std::span<const std::size_t> times, std::size_t draws,
                                           const DrawStream &stream,
                                           ExecPolicy policy = ExecPolicy::Parallel);

/// Same contract as qvr::cost, evaluated with the compiled kernels.
[[nodiscard]] double cost_compiled(const Dataset &data, const CostBatch &batch,
                                   const CompiledModel &model, double tau,
                                   const DrawStream &stream,
                                   ExecPolicy policy = ExecPolicy::Parallel);

/// Anomaly scores of every series in `data` over its full time grid.
/// Series i draws from stream.for_series(i).
[[nodiscard]] std::vector<double> score_dataset(const TrainedModel &model, const Dataset &data,
                                                std::size_t draws, const DrawStream &stream,
                                                ExecPolicy policy = ExecPolicy::Parallel);

/// Recomputes C(theta) over the full dataset and time grid: the frozen
/// reference cost of a trained model.
[[nodiscard]] double full_cost(const Dataset &data, const ModelParams &params,
                               const ModelContext &ctx, double tau, std::size_t draws,
                               const DrawStream &stream,
                               ExecPolicy policy = ExecPolicy::Parallel);

} // namespace qvr
