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
#include "cli/config.hpp"
#include "qvr/error.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <iostream>

namespace {

using namespace qvr;
using namespace qvr::cli;

template <typename F>
int guarded(F &&body) {
    try {
        return body();
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum variational rewinding: train, score and evaluate time-series anomaly "
                 "detectors on an exact statevector simulator.\n"
                 "Config precedence: flags > QVR_* environment > --config file > --preset."};
    app.require_subcommand(1);
    app.fallthrough();

    Overrides flags;
    std::string preset;
    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 0;
    auto *preset_opt = app.add_option("--preset", preset,
                                      "didactic|univariate, sinusoids, blobs|static, bivariate, "
                                      "trivariate");
    auto *config_opt = app.add_option("--config", config_path, "JSON config file");
    auto *seed_opt = app.add_option("--seed", seed, "base seed");
    auto *threads_opt = app.add_option("--threads", threads, "OpenMP worker count (0 = default)");
    app.add_option("--set", flags.assignments, "override one key: section.key=value")
        ->type_name("KEY=VALUE");

    std::string out;
    auto *generate = app.add_subcommand("generate", "write a preset's datasets and manifest");
    generate->add_option("--out", out, "output directory")->required();

    std::string data_path;
    auto *train = app.add_subcommand("train", "train a model with multi-restart minibatch search");
    train->add_option("data", data_path, "training CSV (default: the preset's generated X)");
    train->add_option("--out", out, "model JSON path")->required();

    std::string model_path;
    std::vector<std::string> inputs;
    auto *score = app.add_subcommand("score", "score datasets into a score table");
    score->add_option("--model", model_path, "model JSON")->required();
    score->add_option("data", inputs, "dataset CSVs");
    score->add_option("--out", out, "score table CSV")->required();

    auto *score_grid = app.add_subcommand("score-grid", "time-resolved or feature-grid scores");
    score_grid->add_option("--model", model_path, "model JSON")->required();
    score_grid->add_option("--out", out, "grid CSV")->required();

    EvaluateOptions eval_opts;
    auto *evaluate = app.add_subcommand("evaluate", "tune the threshold and report A_B / F1");
    evaluate->add_option("tables", inputs, "score table CSVs")->required();
    evaluate->add_option("--normal", eval_opts.normal, "normal reference dataset name");
    evaluate->add_option("--tune-on", eval_opts.tune_on, "datasets used to tune the threshold");
    evaluate->add_option("--out", out, "report JSON")->required();

    std::string kind;
    auto *sweep = app.add_subcommand("sweep", "run a sweep experiment");
    sweep->add_option("kind", kind, "ne, musigma, tau or optimizers")
        ->required()
        ->check(CLI::IsMember({"ne", "musigma", "tau", "optimizers"}));
    std::string sweep_data;
    sweep->add_option("data", sweep_data, "training CSV (default: data.train or the preset's X)");
    sweep->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*preset_opt) {
        flags.preset = preset;
    }
    if (*config_opt) {
        flags.config_path = config_path;
    }
    if (*seed_opt) {
        flags.seed = seed;
    }
    if (*threads_opt) {
        flags.threads = threads;
    }
    if (!sweep_data.empty()) {
        flags.assignments.push_back("data.train=" + nlohmann::json(sweep_data).dump());
    }

    return guarded([&]() -> int {
        const RunConfig cfg = resolve(flags, environment());
        if (cfg.threads > 0) {
            omp_set_num_threads(cfg.threads);
        }
        std::ostream &log = std::cout;
        if (*generate) {
            return cmd_generate(cfg, out, log);
        }
        if (*train) {
            return cmd_train(cfg, data_path, out, log);
        }
        if (*score) {
            return cmd_score(cfg, model_path, {inputs.begin(), inputs.end()}, out, log);
        }
        if (*score_grid) {
            return cmd_score_grid(cfg, model_path, out, log);
        }
        if (*evaluate) {
            return cmd_evaluate(cfg, {inputs.begin(), inputs.end()}, eval_opts, out, log);
        }
        return cmd_sweep(cfg, kind, out, log);
    });
}
