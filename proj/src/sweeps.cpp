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
#include "qvr/sweeps.hpp"

#include "qvr/data.hpp"
#include "qvr/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>

namespace qvr {

namespace {

constexpr std::uint64_t kNeBatchTag = 0x6e6562ULL;
constexpr std::uint64_t kNeDrawTag = 0x6e6564ULL;
constexpr std::uint64_t kMuSigmaTag = 0x6d73ULL;
constexpr std::uint64_t kGridTag = 0x67726964ULL;

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

Moments moments(const std::vector<double> &v) {
    // Welford; a constant sample gives exactly zero spread.
    Moments m;
    double ss = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = v[k] - m.mean;
        m.mean += d / static_cast<double>(k + 1);
        ss += d * (v[k] - m.mean);
    }
    if (v.size() >= 2) {
        m.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return m;
}

} // namespace

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw ArgumentError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<NeRow> sweep_ne(const Dataset &data, const ModelContext &ctx,
                            const std::vector<ModelParams> &thetas, const NeSweepConfig &cfg,
                            ExecPolicy policy) {
    if (cfg.repeats < 1) {
        throw ArgumentError("repeats must be >= 1");
    }
    if (cfg.n_t < 1 || cfg.n_t > data.points()) {
        throw ArgumentError("N_T out of range");
    }
    std::vector<NeRow> rows;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const CompiledModel model(thetas[k], ctx);
        for (std::size_t nx : cfg.n_x) {
            if (nx < 1 || nx > data.size()) {
                throw ArgumentError("N_X out of range");
            }
            Rng batch_rng(derive_seed(cfg.seed, {kNeBatchTag, k, nx}));
            CostBatch batch;
            batch.series = sample_without_replacement(data.size(), nx, batch_rng);
            batch.times = sample_without_replacement(data.points(), cfg.n_t, batch_rng);
            for (std::size_t ne : cfg.n_e) {
                batch.draws = ne;
                std::vector<double> costs(cfg.repeats);
                for (std::size_t r = 0; r < cfg.repeats; ++r) {
                    const DrawStream stream(derive_seed(cfg.seed, {kNeDrawTag, k, nx, ne, r}));
                    costs[r] = cost_compiled(data, batch, model, cfg.tau, stream, policy);
                }
                const Moments m = moments(costs);
                rows.push_back(NeRow{k, nx, ne, m.mean, m.stddev,
                                     m.mean == 0.0 ? 0.0 : 100.0 * m.stddev / m.mean});
            }
        }
    }
    return rows;
}

void write_ne_table(std::ostream &out, const std::vector<NeRow> &rows) {
    out << "theta,n_x,n_e,mean_cost,std_cost,pct_std\n";
    for (const auto &r : rows) {
        out << r.theta << ',' << r.n_x << ',' << r.n_e << ',' << format_double(r.mean) << ','
            << format_double(r.stddev) << ',' << format_double(r.pct_std) << '\n';
    }
}

std::vector<MuSigmaRow> sweep_mu_sigma(const Dataset &data, const ModelContext &ctx,
                                       const ModelParams &base, const MuSigmaConfig &cfg,
                                       ExecPolicy policy) {
    if (ctx.terms() != 1) {
        throw ArgumentError("the mu-sigma landscape needs a single epsilon term (one qubit)");
    }
    if (cfg.repeats < 1 || cfg.n_e < 1) {
        throw ArgumentError("repeats and N_E must be >= 1");
    }
    if (cfg.n_x < 1 || cfg.n_x > data.size() || cfg.n_t < 1 || cfg.n_t > data.points()) {
        throw ArgumentError("minibatch size out of range");
    }
    Rng batch_rng(derive_seed(cfg.seed, {kMuSigmaTag}));
    CostBatch batch;
    batch.series = sample_without_replacement(data.size(), cfg.n_x, batch_rng);
    batch.times = sample_without_replacement(data.points(), cfg.n_t, batch_rng);
    batch.draws = cfg.n_e;

    const std::size_t points = cfg.mu.size() * cfg.sigma.size();
    std::vector<MuSigmaRow> rows(points);
    const auto npoints = static_cast<long long>(points);
    const bool parallel = policy == ExecPolicy::Parallel;
    std::vector<std::exception_ptr> errors(points);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (long long g = 0; g < npoints; ++g) {
        const auto u = static_cast<std::size_t>(g);
        try {
            ModelParams theta = base;
            theta.mu[0] = cfg.mu[u / cfg.sigma.size()];
            theta.sigma[0] = cfg.sigma[u % cfg.sigma.size()];
            const CompiledModel model(theta, ctx);
            std::vector<double> costs(cfg.repeats);
            for (std::size_t r = 0; r < cfg.repeats; ++r) {
                const DrawStream stream(derive_seed(cfg.seed, {kMuSigmaTag, r}));
                costs[r] = cost_compiled(data, batch, model, cfg.tau, stream, ExecPolicy::Serial);
            }
            rows[u] = MuSigmaRow{theta.mu[0], theta.sigma[0], moments(costs).mean,
                                 quantile(costs, 0.25), quantile(costs, 0.5),
                                 quantile(costs, 0.75)};
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return rows;
}

void write_mu_sigma_table(std::ostream &out, const std::vector<MuSigmaRow> &rows) {
    out << "mu,sigma,mean_cost,q1,median,q3\n";
    for (const auto &r : rows) {
        out << format_double(r.mu) << ',' << format_double(r.sigma) << ','
            << format_double(r.mean) << ',' << format_double(r.q1) << ','
            << format_double(r.median) << ',' << format_double(r.q3) << '\n';
    }
}

double grid_coordinate(std::size_t k, std::size_t resolution) {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(resolution);
}

std::vector<double> score_feature_grid(const TrainedModel &model, std::size_t resolution,
                                       double t, std::size_t draws, const DrawStream &stream,
                                       ExecPolicy policy) {
    if (model.context.spec.features != 2) {
        throw ArgumentError("feature grid scoring needs a two-feature model");
    }
    if (resolution < 1) {
        throw ArgumentError("grid resolution must be >= 1");
    }
    const CompiledModel compiled(model.params, model.context);
    const double centre = model.centre();
    const std::size_t points = resolution * resolution;
    std::vector<double> scores(points);
    const auto npoints = static_cast<long long>(points);
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::Parallel)
    for (long long g = 0; g < npoints; ++g) {
        const auto u = static_cast<std::size_t>(g);
        const double x[2] = {grid_coordinate(u / resolution, resolution),
                             grid_coordinate(u % resolution, resolution)};
        scores[u] = std::abs(centre - compiled.c1(x, t, draws, stream.for_series(u)));
    }
    return scores;
}

std::vector<TauGrid> sweep_tau(const Dataset &blobs, const TrainConfig &train_cfg,
                               const OptimizerSpec &opt, const TauSweepConfig &cfg) {
    if (blobs.points() != 1 || blobs.features() != 2) {
        throw ArgumentError("the tau sweep expects static two-feature data (p = 1, d = 2)");
    }
    std::vector<TauGrid> out;
    for (double tau : cfg.taus) {
        TrainConfig c = train_cfg;
        c.tau = tau;
        const MultiRestartResult runs = multi_restart(blobs, c, opt);
        const TrainedModel &m = runs.best_model();
        TauGrid g;
        g.tau = tau;
        g.ref_cost = m.ref_cost;
        g.ref_penalty = m.ref_penalty;
        g.resolution = cfg.resolution;
        g.scores = score_feature_grid(m, cfg.resolution, blobs.series.front().times.front(),
                                      cfg.score_draws,
                                      DrawStream(derive_seed(train_cfg.base_seed, {kGridTag})));
        const auto inside = std::count_if(g.scores.begin(), g.scores.end(),
                                          [&](double s) { return s <= cfg.level; });
        g.area_fraction = static_cast<double>(inside) / static_cast<double>(g.scores.size());
        out.push_back(std::move(g));
    }
    return out;
}

void write_tau_summary(std::ostream &out, const std::vector<TauGrid> &grids) {
    out << "tau,ref_cost,ref_penalty,area_fraction,resolution\n";
    for (const auto &g : grids) {
        out << format_double(g.tau) << ',' << format_double(g.ref_cost) << ','
            << format_double(g.ref_penalty) << ',' << format_double(g.area_fraction) << ','
            << g.resolution << '\n';
    }
}

void write_tau_grid(std::ostream &out, const TauGrid &grid) {
    out << "tau,x1,x2,score\n";
    for (std::size_t u = 0; u < grid.scores.size(); ++u) {
        out << format_double(grid.tau) << ','
            << format_double(grid_coordinate(u / grid.resolution, grid.resolution)) << ','
            << format_double(grid_coordinate(u % grid.resolution, grid.resolution)) << ','
            << format_double(grid.scores[u]) << '\n';
    }
}

std::vector<OptimizerTraces> benchmark_optimizers(const Dataset &data, const TrainConfig &cfg,
                                                  const OptimizerSpec &base,
                                                  const std::vector<Method> &methods) {
    std::vector<OptimizerTraces> out;
    for (Method m : methods) {
        OptimizerSpec spec = base;
        spec.method = m;
        MultiRestartResult runs = multi_restart(data, cfg, spec);
        OptimizerTraces t;
        t.method = m;
        for (auto &r : runs.runs) {
            t.traces.push_back(std::move(r.trace));
        }
        out.push_back(std::move(t));
    }
    return out;
}

void write_trace_table(std::ostream &out, const std::vector<OptimizerTraces> &runs) {
    out << "method,restart,iteration,cost,best_cost\n";
    for (const auto &m : runs) {
        for (std::size_t r = 0; r < m.traces.size(); ++r) {
            for (const auto &rec : m.traces[r].records) {
                out << to_string(m.method) << ',' << r << ',' << rec.iteration << ','
                    << format_double(rec.cost) << ',' << format_double(rec.best_cost) << '\n';
            }
        }
    }
}

std::vector<TraceBand> trace_density(const std::vector<OptimizerTraces> &runs) {
    std::vector<TraceBand> bands;
    for (const auto &m : runs) {
        std::size_t longest = 0;
        for (const auto &t : m.traces) {
            longest = std::max(longest, t.records.size());
        }
        std::vector<double> column;
        for (std::size_t i = 0; i < longest; ++i) {
            column.clear();
            for (const auto &t : m.traces) {
                if (!t.records.empty()) {
                    column.push_back(t.records[std::min(i, t.records.size() - 1)].best_cost);
                }
            }
            bands.push_back(TraceBand{m.method, i, moments(column).mean, quantile(column, 0.25),
                                      quantile(column, 0.5), quantile(column, 0.75)});
        }
    }
    return bands;
}

void write_trace_density(std::ostream &out, const std::vector<TraceBand> &bands) {
    out << "method,iteration,mean_best,q1,median,q3\n";
    for (const auto &b : bands) {
        out << to_string(b.method) << ',' << b.iteration << ',' << format_double(b.mean) << ','
            << format_double(b.q1) << ',' << format_double(b.median) << ','
            << format_double(b.q3) << '\n';
    }
}

} // namespace qvr
