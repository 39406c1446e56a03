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
#include "qvr/kernels.hpp"

#include "qvr/error.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>

namespace qvr {

namespace {

// Below this many tasks the fork/join overhead dominates.
constexpr std::size_t kMinParallelTasks = 16;

} // namespace

std::vector<Complex> dense_w(const WParams &w) {
    const std::size_t dim = std::size_t{1} << w.qubits();
    std::vector<Complex> m(dim * dim);
    for (std::size_t col = 0; col < dim; ++col) {
        std::vector<Complex> e(dim, Complex{0.0, 0.0});
        e[col] = 1.0;
        Statevector s = Statevector::from_amplitudes(std::move(e));
        apply_w(s, w, false);
        for (std::size_t row = 0; row < dim; ++row) {
            m[row * dim + col] = s[row];
        }
    }
    return m;
}

CompiledModel::CompiledModel(const ModelParams &params, const ModelContext &ctx)
    : params_(params), ctx_(ctx), eta0_(params.eta0_clamped()) {
    params_.validate(ctx_);
    w_ = dense_w(params_.alpha);
    const std::size_t dim = ctx_.generator().dim();
    wdg_.resize(dim * dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            wdg_[c * dim + r] = std::conj(w_[r * dim + c]);
        }
    }
    const auto n = static_cast<double>(ctx_.qubits());
    zbar_.resize(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        zbar_[b] = (n - 2.0 * static_cast<double>(std::popcount(b))) / n;
    }
}

CompiledModel::Workspace CompiledModel::workspace() const {
    const std::size_t dim = ctx_.generator().dim();
    return Workspace{std::vector<Complex>(dim), std::vector<Complex>(dim),
                     std::vector<double>(ctx_.terms()), std::vector<double>(dim)};
}

double CompiledModel::omega(std::span<const double> x_t, double t, std::span<const double> eps,
                            Workspace &ws) const {
    const std::size_t n = ctx_.qubits();
    const std::size_t d = ctx_.spec.features;
    const std::size_t dim = std::size_t{1} << n;
    if (x_t.size() != d) {
        throw ArgumentError("embedding feature count mismatch");
    }
    // Product state: idle qubits d..n-1 stay |0>, so only the top 2^d basis
    // states (low n-d bits zero) carry amplitude.
    const std::size_t shift = n - d;
    std::fill(ws.psi.begin(), ws.psi.end(), Complex{0.0, 0.0});
    double half_c[kMaxQubits];
    double half_s[kMaxQubits];
    for (std::size_t j = 0; j < d; ++j) {
        half_c[j] = std::cos(0.5 * x_t[j]);
        half_s[j] = std::sin(0.5 * x_t[j]);
    }
    for (std::size_t hi = 0; hi < (std::size_t{1} << d); ++hi) {
        double amp = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
            amp *= ((hi >> (d - 1 - j)) & 1U) != 0U ? half_s[j] : half_c[j];
        }
        ws.psi[hi << shift] = amp;
    }

    // tmp = W psi, restricted to the nonzero input columns.
    for (std::size_t r = 0; r < dim; ++r) {
        Complex acc{0.0, 0.0};
        const Complex *row = w_.data() + r * dim;
        for (std::size_t hi = 0; hi < (std::size_t{1} << d); ++hi) {
            const std::size_t c = hi << shift;
            acc += row[c] * ws.psi[c].real();
        }
        ws.tmp[r] = acc;
    }
    diag_phases_into(ctx_.generator(), eps, t, ws.phases);
    for (std::size_t b = 0; b < dim; ++b) {
        ws.tmp[b] *= std::polar(1.0, -ws.phases[b]);
    }
    double mean_z = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        Complex acc{0.0, 0.0};
        const Complex *row = wdg_.data() + r * dim;
        for (std::size_t c = 0; c < dim; ++c) {
            acc += row[c] * ws.tmp[c];
        }
        mean_z += std::norm(acc) * zbar_[r];
    }
    return eta0_ - mean_z;
}

double CompiledModel::c1(std::span<const double> x_t, double t, std::size_t draws,
                         const DrawStream &stream) const {
    if (draws < 1) {
        throw ArgumentError("N_E must be >= 1");
    }
    draws = effective_draws(params_, draws);
    Workspace ws = workspace();
    double acc = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        Rng rng = stream.generator(k);
        sample_epsilon_into(params_, rng, ws.eps);
        const double w = omega(x_t, t, ws.eps, ws);
        acc += w * w;
    }
    return acc / static_cast<double>(draws) / ctx_.cost_scale;
}

double CompiledModel::draw_term(const TimeSeries &x, std::span<const std::size_t> times,
                                const DrawStream &stream, std::size_t draw,
                                Workspace &ws) const {
    Rng rng = stream.generator(draw);
    sample_epsilon_into(params_, rng, ws.eps);
    double inner = 0.0;
    for (auto j : times) {
        const double w = omega(x.point(j), x.times[j], ws.eps, ws);
        inner += w * w;
    }
    return inner / static_cast<double>(times.size());
}

double CompiledModel::c2(const TimeSeries &x, std::span<const std::size_t> times,
                         std::size_t draws, const DrawStream &stream) const {
    if (times.empty()) {
        throw ArgumentError("time batch must not be empty");
    }
    if (draws < 1) {
        throw ArgumentError("N_E must be >= 1");
    }
    if (x.features != ctx_.spec.features) {
        throw ArgumentError("series feature count does not match the model");
    }
    for (auto j : times) {
        if (j >= x.points()) {
            throw IndexError("time index out of range");
        }
    }
    draws = effective_draws(params_, draws);
    Workspace ws = workspace();
    double acc = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        acc += draw_term(x, times, stream, k, ws);
    }
    return acc / static_cast<double>(draws) / ctx_.cost_scale;
}

std::vector<double> c2_batch(const CompiledModel &model, const Dataset &data,
                             std::span<const std::size_t> series,
                             std::span<const std::size_t> times, std::size_t draws,
                             const DrawStream &stream, ExecPolicy policy) {
    if (draws < 1) {
        throw ArgumentError("N_E must be >= 1");
    }
    if (times.empty()) {
        throw ArgumentError("time batch must not be empty");
    }
    for (auto i : series) {
        if (i >= data.size()) {
            throw IndexError("series index out of range");
        }
        const auto &x = data.series[i];
        if (x.features != model.context().spec.features) {
            throw ArgumentError("series feature count does not match the model");
        }
        for (auto j : times) {
            if (j >= x.points()) {
                throw IndexError("time index out of range");
            }
        }
    }

    draws = effective_draws(model.params(), draws);
    const std::size_t tasks = series.size() * draws;
    std::vector<double> partial(tasks);
    const bool parallel = policy == ExecPolicy::Parallel && tasks >= kMinParallelTasks;
    const auto ntasks = static_cast<long long>(tasks);

#pragma omp parallel if (parallel)
    {
        CompiledModel::Workspace ws = model.workspace();
#pragma omp for schedule(static)
        for (long long task = 0; task < ntasks; ++task) {
            const auto u = static_cast<std::size_t>(task);
            const std::size_t i = u / draws;
            const std::size_t k = u % draws;
            partial[u] = model.draw_term(data.series[series[i]], times,
                                         stream.for_series(series[i]), k, ws);
        }
    }

    std::vector<double> out(series.size());
    const double scale = model.context().cost_scale;
    for (std::size_t i = 0; i < series.size(); ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < draws; ++k) {
            acc += partial[i * draws + k];
        }
        out[i] = acc / static_cast<double>(draws) / scale;
    }
    return out;
}

double cost_compiled(const Dataset &data, const CostBatch &batch, const CompiledModel &model,
                     double tau, const DrawStream &stream, ExecPolicy policy) {
    batch.validate(data.size(), data.points());
    const auto terms = c2_batch(model, data, batch.series, batch.times, batch.draws, stream, policy);
    double acc = 0.0;
    for (double v : terms) {
        acc += v;
    }
    return penalty(model.params().sigma, tau) +
           acc / (2.0 * static_cast<double>(batch.series.size()));
}

std::vector<double> score_dataset(const TrainedModel &model, const Dataset &data,
                                  std::size_t draws, const DrawStream &stream,
                                  ExecPolicy policy) {
    if (data.empty()) {
        return {};
    }
    const CompiledModel compiled(model.params, model.context);
    std::vector<std::size_t> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    const auto times = full_time_batch(data.points());
    auto scores = c2_batch(compiled, data, idx, times, draws, stream, policy);
    const double centre = model.centre();
    for (auto &s : scores) {
        s = std::abs(centre - s);
    }
    return scores;
}

double full_cost(const Dataset &data, const ModelParams &params, const ModelContext &ctx,
                 double tau, std::size_t draws, const DrawStream &stream, ExecPolicy policy) {
    CostBatch batch;
    batch.series.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        batch.series[i] = i;
    }
    batch.times = full_time_batch(data.points());
    batch.draws = draws;
    return cost_compiled(data, batch, CompiledModel(params, ctx), tau, stream, policy);
}

} // namespace qvr
