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
 * Subcommand implementations behind the qvr executable.
 */
#pragma once

#include "cli/config.hpp"
#include "qvr/eval.hpp"
#include "qvr/persist.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qvr::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitNumeric = 4,
};

/// Datasets a preset generates, keyed by file name, in a fixed order.
[[nodiscard]] std::vector<std::pair<std::string, Dataset>> preset_datasets(const RunConfig &cfg);

/// The preset's training set; data.train overrides generation.
[[nodiscard]] Dataset training_set(const RunConfig &cfg);

[[nodiscard]] Dataset load_input(const RunConfig &cfg, const std::filesystem::path &path);

/// Scoring stream for a named dataset under a model; independent of the
/// order in which datasets are passed.
[[nodiscard]] DrawStream scoring_stream(std::uint64_t base_seed, std::string_view dataset);

[[nodiscard]] ModelDocument train_model(const RunConfig &cfg, const Dataset &data,
                                        std::vector<TrainTrace> *all_traces = nullptr);

[[nodiscard]] ScoreTable score_datasets(const RunConfig &cfg, const ModelDocument &model,
                                        const std::vector<Dataset> &inputs);

struct EvaluateOptions {
    std::string normal;                ///< dataset treated as the normal reference
    std::vector<std::string> tune_on;  ///< datasets used to tune zeta; empty = all
};

/// JSON report text.
[[nodiscard]] std::string evaluate_tables(const RunConfig &cfg, const std::vector<ScoreTable> &tables,
                                          const EvaluateOptions &opts);

int cmd_generate(const RunConfig &cfg, const std::filesystem::path &out_dir, std::ostream &log);
int cmd_train(const RunConfig &cfg, const std::filesystem::path &data_path,
              const std::filesystem::path &out, std::ostream &log);
int cmd_score(const RunConfig &cfg, const std::filesystem::path &model_path,
              const std::vector<std::filesystem::path> &data, const std::filesystem::path &out,
              std::ostream &log);
int cmd_score_grid(const RunConfig &cfg, const std::filesystem::path &model_path,
                   const std::filesystem::path &out, std::ostream &log);
int cmd_evaluate(const RunConfig &cfg, const std::vector<std::filesystem::path> &tables,
                 const EvaluateOptions &opts, const std::filesystem::path &out, std::ostream &log);
int cmd_sweep(const RunConfig &cfg, const std::string &kind, const std::filesystem::path &out_dir,
              std::ostream &log);

} // namespace qvr::cli
