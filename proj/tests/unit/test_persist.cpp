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
#include "doctest.h"

#include "qvr/data.hpp"
#include "qvr/error.hpp"
#include "qvr/persist.hpp"
#include "qvr/train.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>

using namespace qvr;

namespace {

struct Fixture {
    Dataset data = minmax_rescale(gen_gaussian(8, 10, 0.1, 1));
    TrainConfig cfg;
    TrainResult result;
    ModelDocument doc;

    Fixture() {
        cfg.batch_series = 4;
        cfg.batch_times = 5;
        cfg.draws = 4;
        cfg.layers = 2;
        cfg.base_seed = 17;
        cfg.ref_draws = 30;
        OptimizerSpec opt;
        opt.max_evaluations = 50;
        result = train(data, cfg, opt);
        doc.model = result.model;
        doc.base_seed = cfg.base_seed;
        doc.config_hash = "00ff00ff00ff00ff";
        doc.config_json = R"({"seed":17})";
        doc.trace = result.trace;
        doc.restart_costs = {result.model.ref_cost, 0.5};
    }
};

} // namespace

TEST_CASE("model round trip") {
    const Fixture f;
    const std::string text = model_to_json(f.doc);
    const ModelDocument back = model_from_json(text);
    CHECK(back.model.params.flatten() == f.doc.model.params.flatten());
    CHECK(back.model.ref_cost == f.doc.model.ref_cost);
    CHECK(back.model.ref_penalty == f.doc.model.ref_penalty);
    CHECK(back.model.tau == f.doc.model.tau);
    CHECK(back.model.ref_draws == f.doc.model.ref_draws);
    CHECK(back.model.seed == f.doc.model.seed);
    CHECK(back.model.context.qubits() == 2);
    CHECK(back.model.context.layers == 2);
    CHECK(back.base_seed == 17);
    CHECK(back.config_hash == f.doc.config_hash);
    CHECK(nlohmann::json::parse(back.config_json) == nlohmann::json::parse(f.doc.config_json));
    CHECK(back.restart_costs == f.doc.restart_costs);
    REQUIRE(back.trace.records.size() == f.doc.trace.records.size());
    CHECK(back.trace.records.back().best_cost == f.doc.trace.records.back().best_cost);
    CHECK(model_to_json(back) == text);
}

TEST_CASE("reloaded model reproduces its reference cost") {
    const Fixture f;
    const auto path = std::filesystem::temp_directory_path() / "qvr_test_model.json";
    save_model(path, f.doc);
    const ModelDocument back = load_model(path);
    std::filesystem::remove(path);
    const TrainedModel &m = back.model;
    const double recomputed =
        full_cost(f.data, m.params, m.context, m.tau, m.ref_draws, reference_stream(back.base_seed));
    CHECK(std::abs(recomputed - f.doc.model.ref_cost) <= 1e-12);
}

TEST_CASE("malformed documents") {
    const Fixture f;
    auto j = nlohmann::json::parse(model_to_json(f.doc));
    CHECK_THROWS_AS((void)model_from_json("{not json"), DataError);
    auto bad = j;
    bad["format"] = "other";
    CHECK_THROWS_AS((void)model_from_json(bad.dump()), DataError);
    bad = j;
    bad["version"] = 99;
    CHECK_THROWS_AS((void)model_from_json(bad.dump()), DataError);
    bad = j;
    bad["params"]["mu"].push_back(0.1);
    CHECK_THROWS_AS((void)model_from_json(bad.dump()), DataError);
    bad = j;
    bad.erase("reference");
    CHECK_THROWS_AS((void)model_from_json(bad.dump()), DataError);
    CHECK_THROWS_AS((void)load_model("/nonexistent/model.json"), DataError);
}

TEST_CASE("manifest") {
    SpikeParams sp;
    const Dataset g = gen_spikes(5, 7, 0.1, sp, 2, "G");
    const ManifestEntry e = manifest_entry("G.csv", g);
    CHECK(e.series == 5);
    CHECK(e.points == 7);
    CHECK(e.features == 1);
    CHECK(e.anomalous == 5);
    CHECK(e.normal == 0);
    const auto path = std::filesystem::temp_directory_path() / "qvr_test_manifest.json";
    save_manifest(path, "didactic", 3, "abc", {e});
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    std::filesystem::remove(path);
    CHECK(j["preset"] == "didactic");
    CHECK(j["seed"] == 3);
    CHECK(j["config_hash"] == "abc");
    CHECK(j["files"].size() == 1);
}
