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
#include "cli/commands.hpp"

#include "qvr/error.hpp"
#include "qvr/eval.hpp"
#include "qvr/kernels.hpp"
#include "qvr/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qvr::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGenTag = 0x67656eULL;
constexpr std::uint64_t kScoreTag = 0x73636fULL;
constexpr std::uint64_t kSweepTag = 0x737770ULL;

std::uint64_t gen_seed(const RunConfig &cfg, std::uint64_t which) {
    return derive_seed(cfg.seed, {kGenTag, which});
}

std::uint64_t fnv(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::ofstream open_out(const std::filesystem::path &path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    return out;
}

void hash_line(std::ostream &out, const RunConfig &cfg) {
    out << "# config_hash=" << cfg.hash << '\n';
}

double lerp_grid(double lo, double hi, std::size_t k, std::size_t count) {
    return count == 1 ? lo
                      : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
}

json confusion_json(const Confusion &c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

} // namespace

std::vector<std::pair<std::string, Dataset>> preset_datasets(const RunConfig &cfg) {
    const DataSettings &d = cfg.data;
    std::vector<std::pair<std::string, Dataset>> out;
    if (cfg.preset == "didactic") {
        out.emplace_back("X.csv", gen_gaussian(d.series, d.points, d.noise_std, gen_seed(cfg, 1), "X"));
        out.emplace_back("F.csv", gen_gaussian(d.series, d.points, d.noise_std, gen_seed(cfg, 2), "F"));
        out.emplace_back("G.csv", gen_spikes(d.series, d.points, d.noise_std, d.spikes,
                                             gen_seed(cfg, 3), "G"));
        out.emplace_back("H.csv", gen_sine_added(d.series, d.points, d.noise_std,
                                                 gen_seed(cfg, 4), "H"));
    } else if (cfg.preset == "sinusoids") {
        out.emplace_back("X.csv", gen_sinusoids(SinusoidKind::R, d.sinusoid_train, gen_seed(cfg, 1),
                                                d.sinusoid_offset_std, "X"));
        out.emplace_back("R.csv", gen_sinusoids(SinusoidKind::R, d.sinusoid_test, gen_seed(cfg, 2),
                                                d.sinusoid_offset_std, "R"));
        out.emplace_back("W.csv", gen_sinusoids(SinusoidKind::W, d.sinusoid_test, gen_seed(cfg, 3),
                                                d.sinusoid_offset_std, "W"));
        out.emplace_back("Z.csv", gen_sinusoids(SinusoidKind::Z, d.sinusoid_test, gen_seed(cfg, 4),
                                                d.sinusoid_anomalous_offset_std, "Z"));
    } else if (cfg.preset == "blobs") {
        out.emplace_back("blobs.csv",
                         gen_blobs(d.blob_count, d.blob_std, d.blob_centre, gen_seed(cfg, 1), "blobs"));
    } else {
        throw ConfigError("preset '" + cfg.preset +
                          "' has no generator; supply the published CSVs via data.train");
    }
    return out;
}

Dataset load_input(const RunConfig &cfg, const std::filesystem::path &path) {
    Dataset ds = load_csv(path);
    if (cfg.data.rescale && ds.size() >= 1) {
        std::size_t degenerate = 0;
        ds = minmax_rescale(ds, &degenerate);
        if (degenerate > 0) {
            std::fprintf(stderr, "warning: %s: %zu degenerate (time, feature) points mapped to 0\n",
                         path.string().c_str(), degenerate);
        }
    }
    return ds;
}

Dataset training_set(const RunConfig &cfg) {
    if (!cfg.data.train.empty()) {
        return load_input(cfg, cfg.data.train);
    }
    return preset_datasets(cfg).front().second;
}

DrawStream scoring_stream(std::uint64_t base_seed, std::string_view dataset) {
    return DrawStream(derive_seed(base_seed, {kScoreTag, fnv(dataset)}));
}

ModelDocument train_model(const RunConfig &cfg, const Dataset &data,
                          std::vector<TrainTrace> *all_traces) {
    MultiRestartResult runs = multi_restart(data, cfg.train, cfg.optimizer);
    ModelDocument doc;
    doc.model = runs.best_model();
    doc.base_seed = cfg.train.base_seed;
    doc.config_hash = cfg.hash;
    doc.config_json = cfg.document.dump();
    doc.trace = runs.runs[runs.best].trace;
    for (const auto &r : runs.runs) {
        doc.restart_costs.push_back(r.model.ref_cost);
    }
    if (all_traces != nullptr) {
        all_traces->clear();
        for (auto &r : runs.runs) {
            all_traces->push_back(std::move(r.trace));
        }
    }
    return doc;
}

ScoreTable score_datasets(const RunConfig &cfg, const ModelDocument &model,
                          const std::vector<Dataset> &inputs) {
    ScoreTable table;
    table.config_hash = cfg.hash;
    for (const auto &ds : inputs) {
        if (ds.empty()) {
            continue;
        }
        if (ds.features() != model.model.context.spec.features) {
            throw DataError("dataset '" + ds.name + "' has " + std::to_string(ds.features()) +
                            " features, the model expects " +
                            std::to_string(model.model.context.spec.features));
        }
        const auto scores = score_dataset(model.model, ds, cfg.eval.score_draws,
                                          scoring_stream(model.base_seed, ds.name));
        const ScoreTable part = make_score_table(ds, scores);
        table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
    }
    return table;
}

std::string evaluate_tables(const RunConfig &cfg, const std::vector<ScoreTable> &tables,
                            const EvaluateOptions &opts) {
    std::vector<ScoreRow> rows;
    for (const auto &t : tables) {
        rows.insert(rows.end(), t.rows.begin(), t.rows.end());
    }
    ScoreTable all;
    all.rows = rows;
    const std::string normal = opts.normal.empty() ? cfg.eval.normal : opts.normal;
    const auto names = all.datasets();
    if (std::find(names.begin(), names.end(), normal) == names.end()) {
        throw DataError("no rows for the normal dataset '" + normal + "'");
    }
    for (const auto &t : opts.tune_on) {
        if (std::find(names.begin(), names.end(), t) == names.end()) {
            throw DataError("no rows for tuning dataset '" + t + "'");
        }
    }
    auto is_normal = [&](const ScoreRow &r) { return r.dataset == normal || r.label == Label::Normal; };
    auto tuned_on = [&](const ScoreRow &r) {
        return r.dataset == normal || opts.tune_on.empty() ||
               std::find(opts.tune_on.begin(), opts.tune_on.end(), r.dataset) != opts.tune_on.end();
    };
    std::vector<double> tn;
    std::vector<double> ta;
    for (const auto &r : rows) {
        if (tuned_on(r)) {
            (is_normal(r) ? tn : ta).push_back(r.score);
        }
    }
    if (ta.empty()) {
        throw DataError("no anomalous candidates to tune the threshold against");
    }
    const ThresholdResult tuned = tune_threshold(tn, ta);

    json report;
    report["config_hash"] = cfg.hash;
    for (const auto &t : tables) {
        if (!t.config_hash.empty()) {
            report["table_hashes"].push_back(t.config_hash);
        }
    }
    report["normal"] = normal;
    report["tune_on"] = opts.tune_on;
    report["zeta"] = std::isfinite(tuned.zeta) ? json(tuned.zeta) : json(tuned.zeta > 0 ? "inf" : "-inf");
    report["balanced_accuracy"] = tuned.balanced_accuracy;
    report["f1"] = tuned.f1;
    report["confusion"] = confusion_json(tuned.confusion);
    std::vector<double> all_scores;
    for (const auto &r : rows) {
        all_scores.push_back(r.score);
    }
    report["close_call_delta"] = cfg.eval.close_call_delta;
    report["close_call_fraction"] = close_call_fraction(all_scores, tuned.zeta, cfg.eval.close_call_delta);

    const auto normal_scores = all.scores_of(normal);
    json per = json::array();
    for (const auto &name : names) {
        std::vector<double> dn = normal_scores;
        std::vector<double> da;
        std::vector<double> scores;
        for (const auto &r : rows) {
            if (r.dataset != name) {
                continue;
            }
            scores.push_back(r.score);
            if (name != normal) {
                (r.label == Label::Normal ? dn : da).push_back(r.score);
            }
        }
        json e;
        e["name"] = name;
        e["count"] = scores.size();
        e["mean_score"] = std::accumulate(scores.begin(), scores.end(), 0.0) /
                          static_cast<double>(scores.size());
        e["median_score"] = quantile(scores, 0.5);
        e["min_score"] = *std::min_element(scores.begin(), scores.end());
        e["max_score"] = *std::max_element(scores.begin(), scores.end());
        if (name != normal && !da.empty()) {
            const ThresholdResult at = evaluate_threshold(dn, da, tuned.zeta);
            e["balanced_accuracy"] = at.balanced_accuracy;
            e["f1"] = at.f1;
            e["confusion"] = confusion_json(at.confusion);
            e["best_balanced_accuracy"] = tune_threshold(dn, da).balanced_accuracy;
        }
        if (name != normal) {
            e["rank_test_p_vs_normal"] = mann_whitney(scores, normal_scores).p_value;
        }
        per.push_back(std::move(e));
    }
    report["datasets"] = std::move(per);

    const auto windows = detection_probability(rows, tuned.zeta, cfg.eval.window, cfg.eval.step);
    if (!windows.empty()) {
        json w = json::array();
        for (const auto &win : windows) {
            w.push_back({{"start", win.start},
                         {"min_value_usd", win.min_value},
                         {"max_value_usd", win.max_value},
                         {"mean_value_usd", win.mean_value},
                         {"detection_probability", win.detection_probability}});
        }
        report["detection_windows"] = std::move(w);
    }
    return report.dump(2);
}

int cmd_generate(const RunConfig &cfg, const std::filesystem::path &out_dir, std::ostream &log) {
    std::filesystem::create_directories(out_dir);
    std::vector<ManifestEntry> entries;
    for (const auto &[file, ds] : preset_datasets(cfg)) {
        save_csv(out_dir / file, ds);
        entries.push_back(manifest_entry(file, ds));
        log << "wrote " << (out_dir / file).string() << " (" << ds.size() << " x " << ds.points()
            << " x " << ds.features() << ")\n";
    }
    save_manifest(out_dir / "manifest.json", cfg.preset, cfg.seed, cfg.hash, entries);
    return kExitOk;
}

int cmd_train(const RunConfig &cfg, const std::filesystem::path &data_path,
              const std::filesystem::path &out, std::ostream &log) {
    const Dataset data = data_path.empty() ? training_set(cfg) : load_input(cfg, data_path);
    std::vector<TrainTrace> traces;
    const ModelDocument doc = train_model(cfg, data, &traces);
    if (out.has_parent_path()) {
        std::filesystem::create_directories(out.parent_path());
    }
    save_model(out, doc);
    std::filesystem::path trace_path = out;
    trace_path.replace_extension(".traces.jsonl");
    std::ofstream tr = open_out(trace_path);
    for (std::size_t r = 0; r < traces.size(); ++r) {
        for (const auto &rec : traces[r].records) {
            tr << json{{"restart", r},
                       {"iteration", rec.iteration},
                       {"cost", rec.cost},
                       {"best_cost", rec.best_cost},
                       {"wall_ms", rec.wall_ms}}
                      .dump()
               << '\n';
        }
    }
    log << "trained on " << data.name << " (" << data.size() << " series), " << traces.size()
        << " restarts x " << cfg.optimizer.max_evaluations << " minibatches\n"
        << "reference cost " << format_double(doc.model.ref_cost) << ", penalty "
        << format_double(doc.model.ref_penalty) << "\n"
        << "wrote " << out.string() << " and " << trace_path.string() << '\n';
    return kExitOk;
}

int cmd_score(const RunConfig &cfg, const std::filesystem::path &model_path,
              const std::vector<std::filesystem::path> &data, const std::filesystem::path &out,
              std::ostream &log) {
    const ModelDocument model = load_model(model_path);
    std::vector<Dataset> inputs;
    for (const auto &p : data) {
        inputs.push_back(load_input(cfg, p));
    }
    const ScoreTable table = score_datasets(cfg, model, inputs);
    std::ofstream os = open_out(out);
    write_score_table(os, table);
    log << "scored " << table.rows.size() << " series into " << out.string() << '\n';
    return kExitOk;
}

int cmd_score_grid(const RunConfig &cfg, const std::filesystem::path &model_path,
                   const std::filesystem::path &out, std::ostream &log) {
    const ModelDocument doc = load_model(model_path);
    const TrainedModel &m = doc.model;
    const DrawStream stream = scoring_stream(doc.base_seed, "grid");
    const GridSettings &g = cfg.eval.grid;
    std::ofstream os = open_out(out);
    hash_line(os, cfg);
    std::size_t rows = 0;
    if (m.context.spec.features == 1) {
        const CompiledModel compiled(m.params, m.context);
        const std::size_t points = g.t_count * g.x_count;
        std::vector<double> scores(points);
        const auto n = static_cast<long long>(points);
#pragma omp parallel for schedule(static)
        for (long long k = 0; k < n; ++k) {
            const auto u = static_cast<std::size_t>(k);
            const double t = lerp_grid(g.t_min, g.t_max, u / g.x_count, g.t_count);
            const double x[1] = {lerp_grid(g.x_min, g.x_max, u % g.x_count, g.x_count)};
            scores[u] = std::abs(m.centre() - compiled.c1(x, t, cfg.eval.score_draws,
                                                          stream.for_series(u)));
        }
        os << "t,x,score\n";
        for (std::size_t u = 0; u < points; ++u) {
            os << format_double(lerp_grid(g.t_min, g.t_max, u / g.x_count, g.t_count)) << ','
               << format_double(lerp_grid(g.x_min, g.x_max, u % g.x_count, g.x_count)) << ','
               << format_double(scores[u]) << '\n';
        }
        rows = points;
    } else if (m.context.spec.features == 2) {
        TauGrid grid;
        grid.tau = m.tau;
        grid.resolution = g.resolution;
        grid.scores = score_feature_grid(m, g.resolution, g.t_static, cfg.eval.score_draws, stream);
        os << "x1,x2,score\n";
        for (std::size_t u = 0; u < grid.scores.size(); ++u) {
            os << format_double(grid_coordinate(u / g.resolution, g.resolution)) << ','
               << format_double(grid_coordinate(u % g.resolution, g.resolution)) << ','
               << format_double(grid.scores[u]) << '\n';
        }
        rows = grid.scores.size();
    } else {
        throw ConfigError("score-grid supports one- or two-feature models only");
    }
    log << "wrote " << rows << " grid points to " << out.string() << '\n';
    return kExitOk;
}

int cmd_evaluate(const RunConfig &cfg, const std::vector<std::filesystem::path> &tables,
                 const EvaluateOptions &opts, const std::filesystem::path &out, std::ostream &log) {
    std::vector<ScoreTable> loaded;
    for (const auto &p : tables) {
        loaded.push_back(load_score_table(p));
    }
    const std::string report = evaluate_tables(cfg, loaded, opts);
    std::ofstream os = open_out(out);
    os << report << '\n';
    const json j = json::parse(report);
    log << "zeta " << j["zeta"].dump() << ", balanced accuracy "
        << format_double(j["balanced_accuracy"].get<double>()) << ", F1 "
        << format_double(j["f1"].get<double>()) << "\nwrote " << out.string() << '\n';
    return kExitOk;
}

int cmd_sweep(const RunConfig &cfg, const std::string &kind, const std::filesystem::path &out_dir,
              std::ostream &log) {
    std::filesystem::create_directories(out_dir);
    const SweepSettings &s = cfg.eval.sweep;
    Rng rng(derive_seed(cfg.seed, {kSweepTag}));
    if (kind == "ne") {
        const Dataset data = training_set(cfg);
        const ModelContext ctx(EmbeddingSpec{data.features(), cfg.train.qubits}, cfg.train.layers,
                               cfg.train.cost_scale);
        std::vector<ModelParams> thetas;
        for (std::size_t k = 0; k < s.ne_thetas; ++k) {
            thetas.push_back(initial_params(ctx, cfg.train.init, rng));
        }
        const auto rows = sweep_ne(data, ctx, thetas, s.ne);
        std::ofstream os = open_out(out_dir / "ne.csv");
        hash_line(os, cfg);
        write_ne_table(os, rows);
        log << "wrote " << rows.size() << " rows to " << (out_dir / "ne.csv").string() << '\n';
    } else if (kind == "musigma") {
        const Dataset data = training_set(cfg);
        if (data.features() != 1) {
            throw ConfigError("the musigma sweep needs univariate data");
        }
        const ModelContext ctx(EmbeddingSpec{1, 1}, cfg.train.layers, cfg.train.cost_scale);
        const ModelParams base = initial_params(ctx, cfg.train.init, rng);
        const auto rows = sweep_mu_sigma(data, ctx, base, s.musigma);
        std::ofstream os = open_out(out_dir / "musigma.csv");
        hash_line(os, cfg);
        write_mu_sigma_table(os, rows);
        log << "wrote " << rows.size() << " rows to " << (out_dir / "musigma.csv").string() << '\n';
    } else if (kind == "tau") {
        const Dataset data = training_set(cfg);
        const auto grids = sweep_tau(data, cfg.train, cfg.optimizer, s.tau);
        std::ofstream os = open_out(out_dir / "tau_summary.csv");
        hash_line(os, cfg);
        write_tau_summary(os, grids);
        for (std::size_t k = 0; k < grids.size(); ++k) {
            std::ofstream gs = open_out(out_dir / ("tau_grid_" + std::to_string(k) + ".csv"));
            hash_line(gs, cfg);
            write_tau_grid(gs, grids[k]);
        }
        log << "wrote " << grids.size() << " tau grids to " << out_dir.string() << '\n';
    } else if (kind == "optimizers") {
        const Dataset data = training_set(cfg);
        TrainConfig tc = cfg.train;
        tc.restarts = s.optimizer_restarts;
        const auto runs = benchmark_optimizers(data, tc, cfg.optimizer, s.methods);
        std::ofstream os = open_out(out_dir / "optimizer_traces.csv");
        hash_line(os, cfg);
        write_trace_table(os, runs);
        std::ofstream ds = open_out(out_dir / "optimizer_density.csv");
        hash_line(ds, cfg);
        write_trace_density(ds, trace_density(runs));
        log << "wrote optimizer traces to " << out_dir.string() << '\n';
    } else {
        throw ConfigError("unknown sweep kind '" + kind + "' (expected ne, musigma, tau, optimizers)");
    }
    return kExitOk;
}

} // namespace qvr::cli
