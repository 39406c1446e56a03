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
 * Self-describing JSON documents: trained models and dataset manifests.
 */
#pragma once

#include "qvr/model.hpp"
#include "qvr/optimize.hpp"
#include "qvr/timeseries.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qvr {

inline constexpr int kModelSchemaVersion = 1;

struct ModelDocument {
    TrainedModel model;
    std::uint64_t base_seed = 0; ///< seeds the reference stream
    std::string config_hash;
    std::string config_json = "{}"; ///< resolved run configuration
    TrainTrace trace;
    std::vector<double> restart_costs; ///< reference cost of every restart
};

[[nodiscard]] std::string model_to_json(const ModelDocument &doc);
[[nodiscard]] ModelDocument model_from_json(const std::string &text);
void save_model(const std::filesystem::path &path, const ModelDocument &doc);
[[nodiscard]] ModelDocument load_model(const std::filesystem::path &path);

struct ManifestEntry {
    std::string file;
    std::string name;
    std::size_t series = 0;
    std::size_t points = 0;
    std::size_t features = 0;
    std::size_t normal = 0;
    std::size_t anomalous = 0;
};

[[nodiscard]] ManifestEntry manifest_entry(const std::string &file, const Dataset &data);
void save_manifest(const std::filesystem::path &path, const std::string &preset,
                   std::uint64_t seed, const std::string &config_hash,
                   const std::vector<ManifestEntry> &entries);

} // namespace qvr
