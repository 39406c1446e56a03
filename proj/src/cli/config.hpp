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
 * Run configuration: presets, JSON config files, QVR_* environment
 * overrides and command-line flags, merged in that order of increasing
 * precedence. Every key must exist in the preset tree; unknown keys and
 * type mismatches raise ConfigError before any compute starts.
 */
#pragma once

#include "qvr/data.hpp"
#include "qvr/optimize.hpp"
#include "qvr/sweeps.hpp"
#include "qvr/train.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qvr::cli {

inline constexpr std::string_view kEnvPrefix = "QVR_";

struct DataSettings {
    std::string train;
    bool rescale = false;
    std::size_t series = 50;
    std::size_t points = 50;
    double noise_std = 0.1;
    SpikeParams spikes;
    std::size_t sinusoid_train = 100;
    std::size_t sinusoid_test = 50;
    double sinusoid_offset_std = 0.1;
    double sinusoid_anomalous_offset_std = 0.5;
    std::size_t blob_count = 100;
    double blob_std = 0.0;
    std::array<double, 2> blob_centre{0.0, 0.0};
};

struct GridSettings {
    double t_min = 0.0;
    double t_max = 49.0;
    std::size_t t_count = 50;
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t x_count = 64;
    std::size_t resolution = 64;
    double t_static = 1.0;
};

struct SweepSettings {
    std::size_t ne_thetas = 6;
    NeSweepConfig ne;
    double mu_min = -3.0;
    double mu_max = 3.0;
    std::size_t mu_count = 61;
    MuSigmaConfig musigma;
    TauSweepConfig tau;
    std::vector<Method> methods{Method::Powell, Method::NelderMead};
    std::size_t optimizer_restarts = 100;
};

struct EvalSettings {
    std::size_t score_draws = 100;
    std::string normal = "F";
    double close_call_delta = 1e-3;
    std::size_t window = 285;
    std::size_t step = 1;
    GridSettings grid;
    SweepSettings sweep;
};

struct RunConfig {
    std::string preset;
    std::uint64_t seed = 0;
    int threads = 0;
    DataSettings data;
    TrainConfig train;
    OptimizerSpec optimizer;
    EvalSettings eval;
    nlohmann::json document; ///< fully merged tree
    std::string hash;
};

/// Canonical preset name for an alias, or ConfigError.
[[nodiscard]] std::string canonical_preset(std::string_view name);
[[nodiscard]] std::vector<std::string> preset_names();
[[nodiscard]] nlohmann::json preset_document(std::string_view name);

/// Merges `patch` into `base`; every key of `patch` must already exist in
/// `base` with a compatible type. `where` names the source in errors.
void merge_checked(nlohmann::json &base, const nlohmann::json &patch, const std::string &where);

/// Sets the value at a dotted path ("train.optimizer.method"); the raw text
/// is read as JSON when possible, otherwise as a string.
void set_path(nlohmann::json &doc, std::string_view dotted, std::string_view raw,
              const std::string &where);

/// Applies QVR_* variables. Names map to tree paths by matching keys level
/// by level, e.g. QVR_TRAIN_OPTIMIZER_MAX_EVALUATIONS. QVR_CONFIG and
/// QVR_PRESET are consumed by resolve() and QVR_CRYPTO_DIR is reserved for
/// the acceptance suite.
void apply_env(nlohmann::json &doc, const std::map<std::string, std::string> &env);

[[nodiscard]] std::map<std::string, std::string> environment();

struct Overrides {
    std::optional<std::string> preset;
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::vector<std::string> assignments; ///< "dotted.key=value"
};

[[nodiscard]] RunConfig resolve(const Overrides &flags,
                                const std::map<std::string, std::string> &env);

/// Builds the typed view of a merged document and validates ranges.
[[nodiscard]] RunConfig from_document(const nlohmann::json &doc);

/// FNV-1a 64 of the canonical dump with `threads` removed, as 16 hex digits.
[[nodiscard]] std::string config_hash(const nlohmann::json &doc);

} // namespace qvr::cli
