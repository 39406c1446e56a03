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
#include "qvr/model.hpp"

#include "qvr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <unordered_set>

namespace qvr {

ModelContext::ModelContext(EmbeddingSpec spec_in, std::size_t layers_in, double cost_scale_in)
    : spec(spec_in), layers(layers_in), cost_scale(cost_scale_in) {
    spec.validate();
    if (layers < 1) {
        throw ConfigError("layers must be >= 1");
    }
    if (!(cost_scale > 0.0) || !std::isfinite(cost_scale)) {
        throw ConfigError("cost scale L must be positive");
    }
    gen_ = DiagGenerator(spec.qubits);
}

ModelParams::ModelParams(const ModelContext &ctx)
    : alpha(ctx.layers, ctx.qubits()), mu(ctx.terms(), 0.0), sigma(ctx.terms(), 0.0) {}

double ModelParams::eta0_clamped() const noexcept { return std::clamp(eta0, -1.0, 1.0); }

std::vector<double> ModelParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(dimension());
    flat.insert(flat.end(), alpha.angles().begin(), alpha.angles().end());
    flat.insert(flat.end(), mu.begin(), mu.end());
    flat.insert(flat.end(), sigma.begin(), sigma.end());
    flat.push_back(eta0);
    return flat;
}

ModelParams ModelParams::unflatten(std::span<const double> flat, const ModelContext &ctx) {
    const std::size_t na = WParams::size_for(ctx.layers, ctx.qubits());
    const std::size_t q = ctx.terms();
    if (flat.size() != na + 2 * q + 1) {
        throw ArgumentError("flat parameter vector has length " + std::to_string(flat.size()) +
                            ", expected " + std::to_string(na + 2 * q + 1));
    }
    ModelParams p;
    p.alpha = WParams(ctx.layers, ctx.qubits(),
                      std::vector<double>(flat.begin(), flat.begin() + static_cast<long>(na)));
    p.mu.assign(flat.begin() + static_cast<long>(na), flat.begin() + static_cast<long>(na + q));
    p.sigma.assign(flat.begin() + static_cast<long>(na + q),
                   flat.begin() + static_cast<long>(na + 2 * q));
    p.eta0 = flat.back();
    return p;
}

void ModelParams::validate(const ModelContext &ctx) const {
    if (alpha.layers() != ctx.layers || alpha.qubits() != ctx.qubits()) {
        throw ArgumentError("alpha shape does not match the model context");
    }
    if (mu.size() != ctx.terms() || sigma.size() != ctx.terms()) {
        throw ArgumentError("mu/sigma must have Q = " + std::to_string(ctx.terms()) +
                            " entries");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(mu.begin(), mu.end(), finite) ||
        !std::all_of(sigma.begin(), sigma.end(), finite) || !std::isfinite(eta0)) {
        throw NumericError("model parameters must be finite");
    }
}

void CostBatch::validate(std::size_t num_series, std::size_t num_points) const {
    if (series.empty() || times.empty()) {
        throw ArgumentError("cost batch must contain at least one series and one time point");
    }
    if (draws < 1) {
        throw ArgumentError("N_E must be >= 1");
    }
    auto check = [](const std::vector<std::size_t> &idx, std::size_t limit, const char *what) {
        std::unordered_set<std::size_t> seen;
        for (auto i : idx) {
            if (i >= limit) {
                throw IndexError(std::string(what) + " index " + std::to_string(i) +
                                 " out of range");
            }
            if (!seen.insert(i).second) {
                throw ArgumentError(std::string("duplicate ") + what + " index " +
                                    std::to_string(i));
            }
        }
    };
    check(series, num_series, "series");
    check(times, num_points, "time");
}

void sample_epsilon_into(const ModelParams &params, Rng &rng, std::span<double> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t q = 0; q < params.mu.size(); ++q) {
        const double width = std::abs(params.sigma[q]);
        // Always consume a variate so draw k is independent of sigma's support.
        const double z = normal(rng);
        out[q] = width == 0.0 ? params.mu[q] : params.mu[q] + width * z;
    }
}

std::vector<double> sample_epsilon(const ModelParams &params, Rng &rng) {
    std::vector<double> eps(params.mu.size());
    sample_epsilon_into(params, rng, eps);
    return eps;
}

double omega(std::span<const double> x_t, double t, const ModelParams &params,
             const ModelContext &ctx, std::span<const double> eps) {
    Statevector s = embed(x_t, ctx.spec);
    rewind(s, params.alpha, ctx.generator(), eps, t);
    return params.eta0_clamped() - expectation_mean_z(s);
}

std::size_t effective_draws(const ModelParams &params, std::size_t draws) {
    for (double s : params.sigma) {
        if (s != 0.0) {
            return draws;
        }
    }
    return std::min<std::size_t>(draws, 1);
}

double c1(std::span<const double> x_t, double t, const ModelParams &params,
          const ModelContext &ctx, std::size_t draws, const DrawStream &stream) {
    if (draws < 1) {
        throw ArgumentError("N_E must be >= 1");
    }
    draws = effective_draws(params, draws);
    std::vector<double> eps(ctx.terms());
    double acc = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        Rng rng = stream.generator(k);
        sample_epsilon_into(params, rng, eps);
        const double w = omega(x_t, t, params, ctx, eps);
        acc += w * w;
    }
    return acc / static_cast<double>(draws) / ctx.cost_scale;
}

double c2(const TimeSeries &x, std::span<const std::size_t> time_batch, const ModelParams &params,
          const ModelContext &ctx, std::size_t draws, const DrawStream &stream) {
    if (time_batch.empty()) {
        throw ArgumentError("time batch must not be empty");
    }
    if (draws < 1) {
        throw ArgumentError("N_E must be >= 1");
    }
    if (x.features != ctx.spec.features) {
        throw ArgumentError("series has " + std::to_string(x.features) +
                            " features, model expects " + std::to_string(ctx.spec.features));
    }
    for (auto j : time_batch) {
        if (j >= x.points()) {
            throw IndexError("time index " + std::to_string(j) + " out of range");
        }
    }
    draws = effective_draws(params, draws);
    std::vector<double> eps(ctx.terms());
    double acc = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        Rng rng = stream.generator(k);
        sample_epsilon_into(params, rng, eps);
        double inner = 0.0;
        for (auto j : time_batch) {
            const double w = omega(x.point(j), x.times[j], params, ctx, eps);
            inner += w * w;
        }
        acc += inner / static_cast<double>(time_batch.size());
    }
    return acc / static_cast<double>(draws) / ctx.cost_scale;
}

double penalty(std::span<const double> sigma, double tau) {
    if (tau < 0.0) {
        throw ArgumentError("tau must be >= 0");
    }
    if (sigma.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (double s : sigma) {
        acc += std::atan(2.0 * std::numbers::pi * tau * std::abs(s));
    }
    return acc / (std::numbers::pi * static_cast<double>(sigma.size()));
}

double cost(const Dataset &data, const CostBatch &batch, const ModelParams &params,
            const ModelContext &ctx, double tau, const DrawStream &stream) {
    batch.validate(data.size(), data.points());
    double acc = 0.0;
    for (auto i : batch.series) {
        acc += c2(data.series[i], batch.times, params, ctx, batch.draws, stream.for_series(i));
    }
    return penalty(params.sigma, tau) + acc / (2.0 * static_cast<double>(batch.series.size()));
}

double anomaly_score(const TimeSeries &y, const TrainedModel &model,
                     std::span<const std::size_t> time_batch, std::size_t draws,
                     const DrawStream &stream) {
    return std::abs(model.centre() -
                    c2(y, time_batch, model.params, model.context, draws, stream));
}

double time_resolved_score(const TimeSeries &y, std::size_t time_index, const TrainedModel &model,
                           std::size_t draws, const DrawStream &stream) {
    if (y.features != model.context.spec.features) {
        throw ArgumentError("series feature count does not match the model");
    }
    if (time_index >= y.points()) {
        throw IndexError("time index out of range");
    }
    return time_resolved_score_at(y.point(time_index), y.times[time_index], model, draws, stream);
}

double time_resolved_score_at(std::span<const double> x_t, double t, const TrainedModel &model,
                              std::size_t draws, const DrawStream &stream) {
    return std::abs(model.centre() - c1(x_t, t, model.params, model.context, draws, stream));
}

std::vector<std::size_t> full_time_batch(std::size_t points) {
    std::vector<std::size_t> idx(points);
    for (std::size_t j = 0; j < points; ++j) {
        idx[j] = j;
    }
    return idx;
}

} // namespace qvr
