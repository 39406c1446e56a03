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
#include "qvr/persist.hpp"

#include "qvr/error.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace qvr {

using nlohmann::json;

namespace {

template <typename T>
T field(const json &j, const char *key) {
    if (!j.contains(key)) {
        throw DataError(std::string("model document is missing '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw DataError(std::string("model document field '") + key + "': " + e.what());
    }
}

const json &section(const json &j, const char *key) {
    if (!j.contains(key) || !j.at(key).is_object()) {
        throw DataError(std::string("model document is missing section '") + key + "'");
    }
    return j.at(key);
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

} // namespace

std::string model_to_json(const ModelDocument &doc) {
    const TrainedModel &m = doc.model;
    json j;
    j["format"] = "qvr-model";
    j["version"] = kModelSchemaVersion;
    j["context"] = {{"features", m.context.spec.features},
                    {"qubits", m.context.qubits()},
                    {"layers", m.context.layers},
                    {"terms", m.context.terms()},
                    {"cost_scale", m.context.cost_scale}};
    j["params"] = {{"alpha", to_vector(m.params.alpha.angles())},
                   {"mu", m.params.mu},
                   {"sigma", m.params.sigma},
                   {"eta0", m.params.eta0}};
    j["reference"] = {{"cost", m.ref_cost},
                      {"penalty", m.ref_penalty},
                      {"tau", m.tau},
                      {"draws", m.ref_draws},
                      {"base_seed", doc.base_seed}};
    j["seed"] = m.seed;
    j["config_hash"] = doc.config_hash;
    try {
        j["config"] = json::parse(doc.config_json);
    } catch (const json::exception &e) {
        throw ArgumentError(std::string("config_json is not valid JSON: ") + e.what());
    }
    j["restart_costs"] = doc.restart_costs;
    json trace = json::array();
    for (const auto &r : doc.trace.records) {
        trace.push_back({{"iteration", r.iteration},
                         {"cost", r.cost},
                         {"best_cost", r.best_cost},
                         {"wall_ms", r.wall_ms}});
    }
    j["trace"] = std::move(trace);
    return j.dump(2);
}

ModelDocument model_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw DataError(std::string("model document is not valid JSON: ") + e.what());
    }
    if (field<std::string>(j, "format") != "qvr-model") {
        throw DataError("not a qvr model document");
    }
    const int version = field<int>(j, "version");
    if (version != kModelSchemaVersion) {
        throw DataError("unsupported model schema version " + std::to_string(version));
    }
    const json &c = section(j, "context");
    ModelDocument doc;
    TrainedModel &m = doc.model;
    try {
        m.context = ModelContext(
            EmbeddingSpec{field<std::size_t>(c, "features"), field<std::size_t>(c, "qubits")},
            field<std::size_t>(c, "layers"), field<double>(c, "cost_scale"));
    } catch (const ConfigError &e) {
        throw DataError(std::string("model context: ") + e.what());
    }
    if (field<std::size_t>(c, "terms") != m.context.terms()) {
        throw DataError("model context term count is inconsistent with its qubit count");
    }
    const json &p = section(j, "params");
    try {
        m.params.alpha = WParams(m.context.layers, m.context.qubits(),
                                 field<std::vector<double>>(p, "alpha"));
        m.params.mu = field<std::vector<double>>(p, "mu");
        m.params.sigma = field<std::vector<double>>(p, "sigma");
        m.params.eta0 = field<double>(p, "eta0");
        m.params.validate(m.context);
    } catch (const DataError &) {
        throw;
    } catch (const std::exception &e) {
        throw DataError(std::string("model parameters: ") + e.what());
    }
    const json &r = section(j, "reference");
    m.ref_cost = field<double>(r, "cost");
    m.ref_penalty = field<double>(r, "penalty");
    m.tau = field<double>(r, "tau");
    m.ref_draws = field<std::size_t>(r, "draws");
    doc.base_seed = field<std::uint64_t>(r, "base_seed");
    m.seed = field<std::uint64_t>(j, "seed");
    doc.config_hash = field<std::string>(j, "config_hash");
    doc.config_json = j.contains("config") ? j.at("config").dump() : "{}";
    if (j.contains("restart_costs")) {
        doc.restart_costs = field<std::vector<double>>(j, "restart_costs");
    }
    if (j.contains("trace")) {
        if (!j.at("trace").is_array()) {
            throw DataError("model document trace must be an array");
        }
        for (const auto &t : j.at("trace")) {
            TraceRecord rec;
            rec.iteration = field<std::size_t>(t, "iteration");
            rec.cost = field<double>(t, "cost");
            rec.best_cost = field<double>(t, "best_cost");
            rec.wall_ms = t.value("wall_ms", 0.0);
            doc.trace.records.push_back(rec);
        }
    }
    doc.trace.best_x = m.params.flatten();
    return doc;
}

void save_model(const std::filesystem::path &path, const ModelDocument &doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    out << model_to_json(doc) << '\n';
}

ModelDocument load_model(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

ManifestEntry manifest_entry(const std::string &file, const Dataset &data) {
    ManifestEntry e{file, data.name, data.size(), data.points(), data.features(), 0, 0};
    for (const auto &s : data.series) {
        e.normal += s.label == Label::Normal ? 1 : 0;
        e.anomalous += s.label == Label::Anomalous ? 1 : 0;
    }
    return e;
}

void save_manifest(const std::filesystem::path &path, const std::string &preset,
                   std::uint64_t seed, const std::string &config_hash,
                   const std::vector<ManifestEntry> &entries) {
    json j;
    j["format"] = "qvr-manifest";
    j["version"] = 1;
    j["preset"] = preset;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    json files = json::array();
    for (const auto &e : entries) {
        files.push_back({{"file", e.file},
                         {"name", e.name},
                         {"series", e.series},
                         {"points", e.points},
                         {"features", e.features},
                         {"normal", e.normal},
                         {"anomalous", e.anomalous}});
    }
    j["files"] = std::move(files);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

} // namespace qvr
