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
 * Rewinding model: epsilon sampling, the observable Omega, the cost stack
 * C1 / C2 / C with the arctan penalty, and the anomaly scores.
 *
 * Functions here are the serial, gate-by-gate reference path. The compiled
 * kernels in kernels.hpp compute the same quantities with a precomputed
 * dense W(alpha) and are what training uses.
 */
#pragma once

#include "qvr/ansatz.hpp"
#include "qvr/seeding.hpp"
#include "qvr/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qvr {

inline constexpr double kDefaultCostScale = 4.0;

/// Circuit shape shared by every evaluation of one model.
struct ModelContext {
    EmbeddingSpec spec;
    std::size_t layers = 1;
    double cost_scale = kDefaultCostScale; ///< L in C1 = E[Omega^2] / L

    ModelContext() = default;
    ModelContext(EmbeddingSpec spec, std::size_t layers, double cost_scale = kDefaultCostScale);

    [[nodiscard]] const DiagGenerator &generator() const noexcept { return gen_; }
    [[nodiscard]] std::size_t qubits() const noexcept { return spec.qubits; }
    [[nodiscard]] std::size_t terms() const noexcept { return gen_.terms(); }

  private:
    DiagGenerator gen_;
};

/**
 * @brief theta = [alpha, mu, sigma, eta0].
 *
 * sigma is stored signed and used as |sigma|; eta0 is clamped to [-1, 1]
 * whenever the observable is evaluated.
 */
struct ModelParams {
    WParams alpha;
    std::vector<double> mu;
    std::vector<double> sigma;
    double eta0 = 0.0;

    ModelParams() = default;
    explicit ModelParams(const ModelContext &ctx);

    [[nodiscard]] double eta0_clamped() const noexcept;
    [[nodiscard]] std::size_t dimension() const noexcept {
        return alpha.size() + mu.size() + sigma.size() + 1;
    }
    /// Layout [alpha..., mu..., sigma..., eta0].
    [[nodiscard]] std::vector<double> flatten() const;
    static ModelParams unflatten(std::span<const double> flat, const ModelContext &ctx);

    void validate(const ModelContext &ctx) const;
};

/// Source of epsilon draws. Draw k of a stream always yields the same vector,
/// whichever worker evaluates it.
class DrawStream {
  public:
    explicit DrawStream(std::uint64_t seed) noexcept : seed_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] DrawStream for_series(std::uint64_t series_index) const noexcept {
        return DrawStream(derive_seed(seed_, {0x5e41e5ULL, series_index}));
    }
    [[nodiscard]] Rng generator(std::uint64_t draw) const {
        return Rng(derive_seed(seed_, {0xd7a3ULL, draw}));
    }

  private:
    std::uint64_t seed_;
};

/// Minibatch of series and time indices plus the epsilon draw count.
struct CostBatch {
    std::vector<std::size_t> series;
    std::vector<std::size_t> times;
    std::size_t draws = 1;

    /// Nonempty, in range, no duplicates; throws ArgumentError / IndexError.
    void validate(std::size_t num_series, std::size_t num_points) const;
};

/// eps[q] ~ Normal(mu[q], |sigma[q]|); exactly mu[q] when sigma[q] == 0.
[[nodiscard]] std::vector<double> sample_epsilon(const ModelParams &params, Rng &rng);
void sample_epsilon_into(const ModelParams &params, Rng &rng, std::span<double> out);

/// Draws actually needed: 1 when every sigma is zero (all draws coincide),
/// otherwise `draws`.
[[nodiscard]] std::size_t effective_draws(const ModelParams &params, std::size_t draws);

/// eta0 - <mean Z> on the rewound embedded state, for one epsilon.
[[nodiscard]] double omega(std::span<const double> x_t, double t, const ModelParams &params,
                           const ModelContext &ctx, std::span<const double> eps);

/// Monte-Carlo estimate of E[Omega^2] / L over `draws` epsilon samples.
[[nodiscard]] double c1(std::span<const double> x_t, double t, const ModelParams &params,
                        const ModelContext &ctx, std::size_t draws, const DrawStream &stream);

/// Time average of C1 over the time batch. Each epsilon draw is shared by all
/// time points of the batch.
[[nodiscard]] double c2(const TimeSeries &x, std::span<const std::size_t> time_batch,
                        const ModelParams &params, const ModelContext &ctx, std::size_t draws,
                        const DrawStream &stream);

/// (1 / (pi Q)) sum_q arctan(2 pi tau |sigma_q|), in [0, 1/2).
[[nodiscard]] double penalty(std::span<const double> sigma, double tau);

/// P_tau(sigma) + (1 / (2 N_X)) sum_{i in B_X} C2(x_i). Series i draws from
/// stream.for_series(i).
[[nodiscard]] double cost(const Dataset &data, const CostBatch &batch, const ModelParams &params,
                          const ModelContext &ctx, double tau, const DrawStream &stream);

/// Frozen theta* together with the cluster-centre reference values.
struct TrainedModel {
    ModelParams params;
    ModelContext context;
    double ref_cost = 0.0;    ///< C(theta*) over the full training set and time grid
    double ref_penalty = 0.0; ///< P_tau(sigma*)
    double tau = 0.0;
    std::size_t ref_draws = 100;
    std::uint64_t seed = 0;

    /// 2 (C - P), the training-set mean of C2.
    [[nodiscard]] double centre() const noexcept { return 2.0 * ref_cost - 2.0 * ref_penalty; }
};

/// |2 C(theta*) - 2 P(sigma*) - C2[y]|.
[[nodiscard]] double anomaly_score(const TimeSeries &y, const TrainedModel &model,
                                   std::span<const std::size_t> time_batch, std::size_t draws,
                                   const DrawStream &stream);

/// |2 C(theta*) - 2 P(sigma*) - C1(y(t_j))| at time index j of y.
[[nodiscard]] double time_resolved_score(const TimeSeries &y, std::size_t time_index,
                                         const TrainedModel &model, std::size_t draws,
                                         const DrawStream &stream);

/// Time-resolved score at an arbitrary point (x_t, t).
[[nodiscard]] double time_resolved_score_at(std::span<const double> x_t, double t,
                                            const TrainedModel &model, std::size_t draws,
                                            const DrawStream &stream);

/// All indices 0..p-1.
[[nodiscard]] std::vector<std::size_t> full_time_batch(std::size_t points);

} // namespace qvr
