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

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "qvr/error.hpp"
#include "qvr/data.hpp"
#include "qvr/eval.hpp"
#include "qvr/persist.hpp"
#include "qvr/train.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qvr;
using namespace qvr::cli;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char *p = std::getenv("QVR_CLI");
    return p != nullptr ? p : "qvr";
}

int run(const std::string &args, const std::string &env = "") {
    const std::string cmd =
        "env -u QVR_CLI " + env + " " + cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string &name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string operator/(const std::string &f) const { return (path / f).string(); }
};

const std::map<std::string, std::string> kNoEnv;

} // namespace

TEST_CASE("presets") {
    for (const auto &name : preset_names()) {
        CHECK_NOTHROW((void)from_document(preset_document(name)));
    }
    CHECK(canonical_preset("univariate") == "didactic");
    CHECK(canonical_preset("static") == "blobs");
    CHECK_THROWS_AS((void)canonical_preset("nope"), ConfigError);

    const RunConfig tri = from_document(preset_document("trivariate"));
    CHECK(tri.train.qubits == 3);
    CHECK(ModelContext({3, 3}, tri.train.layers).terms() == 7);
    CHECK(tri.train.batch_series == 10);
    CHECK(tri.train.batch_times == 10);
    CHECK(tri.train.draws == 10);
    CHECK(tri.train.layers == 3);
    CHECK(tri.train.tau == 5.0);

    const RunConfig uni = from_document(preset_document("didactic"));
    CHECK(uni.train.batch_series == 5);
    CHECK(uni.train.batch_times == 10);
    CHECK(uni.train.draws == 10);
    CHECK(uni.train.layers == 1);
    CHECK(uni.train.qubits == 2);
    CHECK(uni.optimizer.max_evaluations == 1000);
}

TEST_CASE("merge rules") {
    Overrides o;
    o.assignments = {"train.bogus=1"};
    CHECK_THROWS_AS((void)resolve(o, kNoEnv), ConfigError);
    o.assignments = {"train.restarts=\"many\""};
    CHECK_THROWS_AS((void)resolve(o, kNoEnv), ConfigError);
    o.assignments = {"train.restarts=0"};
    CHECK_THROWS_AS((void)resolve(o, kNoEnv), ConfigError);
    o.assignments = {"train.optimizer.method=cobyla"};
    CHECK_THROWS_AS((void)resolve(o, kNoEnv), ConfigError);
    o.assignments = {"train.n_e=7", "ansatz.layers=2"};
    const RunConfig c = resolve(o, kNoEnv);
    CHECK(c.train.draws == 7);
    CHECK(c.train.layers == 2);
}

TEST_CASE("precedence and environment") {
    const TempDir dir("qvr_test_cfg");
    {
        std::ofstream f(dir / "c.json");
        f << R"({"seed": 5, "train": {"n_e": 3, "n_t": 4, "n_x": 2}})";
    }
    Overrides o;
    o.config_path = dir / "c.json";
    RunConfig c = resolve(o, kNoEnv);
    CHECK(c.seed == 5);
    CHECK(c.train.draws == 3);

    const std::map<std::string, std::string> env{{"QVR_TRAIN_N_E", "8"},
                                                 {"QVR_TRAIN_OPTIMIZER_MAX_EVALUATIONS", "33"},
                                                 {"QVR_SEED", "6"},
                                                 {"HOME", "/root"}};
    c = resolve(o, env);
    CHECK(c.train.draws == 8);
    CHECK(c.optimizer.max_evaluations == 33);
    CHECK(c.seed == 6);
    CHECK(c.train.batch_times == 4);

    o.assignments = {"train.n_e=9"};
    o.seed = 7;
    c = resolve(o, env);
    CHECK(c.train.draws == 9);
    CHECK(c.seed == 7);

    CHECK_THROWS_AS((void)resolve(Overrides{}, {{"QVR_TRAIN_BOGUS", "1"}}), ConfigError);
    CHECK_THROWS_AS((void)resolve(Overrides{}, {{"QVR_TRAIN_N_E", "x"}}), ConfigError);
    CHECK_NOTHROW((void)resolve(Overrides{}, {{"QVR_CRYPTO_DIR", "/x"}}));
    CHECK(resolve(Overrides{}, {{"QVR_PRESET", "blobs"}}).preset == "blobs");

    const std::string bad = dir / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"data": {"unknown": 1}})";
    }
    Overrides b;
    b.config_path = bad;
    CHECK_THROWS_AS((void)resolve(b, kNoEnv), ConfigError);
    b.config_path = dir / "missing.json";
    CHECK_THROWS_AS((void)resolve(b, kNoEnv), ConfigError);
}

TEST_CASE("config hash ignores threads only") {
    Overrides a, b;
    b.threads = 4;
    CHECK(resolve(a, kNoEnv).hash == resolve(b, kNoEnv).hash);
    CHECK(resolve(a, kNoEnv).hash.size() == 16);
    b.seed = 99;
    CHECK(resolve(a, kNoEnv).hash != resolve(b, kNoEnv).hash);
}

TEST_CASE("exit codes") {
    CHECK(run("--help") == 0);
    CHECK(run("frobnicate") == 2);
    CHECK(run("--preset nope generate --out /tmp/qvr_never") == 2);
    CHECK(run("--set train.bogus=1 train --out /tmp/qvr_never.json") == 2);
    CHECK(run("generate --out /tmp/qvr_never", "QVR_NOT_A_KEY=1") == 2);
    CHECK(run("--preset bivariate generate --out /tmp/qvr_never") == 2);
    CHECK(run("train /nonexistent.csv --out /tmp/qvr_never.json") == 3);

    const TempDir dir("qvr_test_exit");
    {
        std::ofstream f(dir / "inf.csv");
        f << "series_id,t,f1\n";
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 10; ++j) {
                f << "s" << i << ',' << j << ',' << (j == 3 ? "inf" : "0.1") << '\n';
            }
        }
    }
    CHECK(run("--set train.restarts=1 --set train.optimizer.max_evaluations=5 train " +
              (dir / "inf.csv") + " --out " + (dir / "m.json")) == 4);
}

TEST_CASE("generate is byte-identical for a fixed seed") {
    const TempDir a("qvr_test_gen_a"), b("qvr_test_gen_b");
    REQUIRE(run("--seed 3 generate --out " + a.path.string()) == 0);
    REQUIRE(run("--seed 3 generate --out " + b.path.string()) == 0);
    for (const char *f : {"X.csv", "F.csv", "G.csv", "H.csv", "manifest.json"}) {
        const std::string x = slurp(a.path / f);
        CHECK_FALSE(x.empty());
        CHECK(x == slurp(b.path / f));
    }
    const Dataset g = load_csv(a.path / "G.csv");
    CHECK(g.size() == 50);
    CHECK(g.points() == 50);

    const TempDir c("qvr_test_gen_c");
    REQUIRE(run("--preset blobs generate --out " + c.path.string()) == 0);
    const Dataset blobs = load_csv(c.path / "blobs.csv");
    CHECK(blobs.size() == 100);
    CHECK(blobs.points() == 1);
    CHECK(blobs.features() == 2);
}

TEST_CASE("train, score, score-grid and evaluate") {
    const TempDir d("qvr_test_pipeline");
    const std::string quick = "--seed 2 --set train.restarts=2 --set train.optimizer.max_evaluations=30 "
                              "--set eval.score_draws=10 --set eval.grid.t_count=5 "
                              "--set eval.grid.x_count=4 ";
    REQUIRE(run(quick + "generate --out " + d.path.string()) == 0);
    REQUIRE(run(quick + "train " + (d / "X.csv") + " --out " + (d / "model.json")) == 0);
    CHECK(fs::exists(d / "model.traces.jsonl"));

    const ModelDocument doc = load_model(d / "model.json");
    const Dataset x = load_csv(d / "X.csv");
    CHECK(std::abs(full_cost(x, doc.model.params, doc.model.context, doc.model.tau,
                             doc.model.ref_draws, reference_stream(doc.base_seed)) -
                   doc.model.ref_cost) <= 1e-12);
    CHECK(doc.config_hash.size() == 16);

    REQUIRE(run(quick + "score --model " + (d / "model.json") + " " + (d / "F.csv") + " " +
                (d / "G.csv") + " --out " + (d / "scores.csv")) == 0);
    const ScoreTable t = load_score_table(d / "scores.csv");
    CHECK(t.rows.size() == 100);
    CHECK(t.config_hash == doc.config_hash);
    CHECK(t.datasets() == std::vector<std::string>{"F", "G"});

    REQUIRE(run(quick + "score-grid --model " + (d / "model.json") + " --out " + (d / "grid.csv")) == 0);
    const std::string grid = slurp(d / "grid.csv");
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 1 + 1 + 5 * 4);

    REQUIRE(run(quick + "evaluate " + (d / "scores.csv") + " --normal F --out " + (d / "r1.json")) == 0);
    REQUIRE(run(quick + "evaluate " + (d / "scores.csv") + " --normal F --out " + (d / "r2.json")) == 0);
    CHECK(slurp(d / "r1.json") == slurp(d / "r2.json"));
    CHECK(run(quick + "evaluate " + (d / "scores.csv") + " --normal Q --out " + (d / "r3.json")) != 0);

    {
        std::ofstream f(d / "empty.csv");
        f << "series_id,t,f1\n";
    }
    REQUIRE(run(quick + "score --model " + (d / "model.json") + " " + (d / "empty.csv") +
                " --out " + (d / "empty_scores.csv")) == 0);
    const ScoreTable e = load_score_table(d / "empty_scores.csv");
    CHECK(e.rows.empty());
    CHECK(slurp(d / "empty_scores.csv").find("series_id,dataset,score,label") != std::string::npos);
}

TEST_CASE("separated tables evaluate perfectly") {
    const TempDir d("qvr_test_eval");
    ScoreTable t;
    for (int i = 0; i < 5; ++i) {
        t.rows.push_back({"n" + std::to_string(i), "N", 0.01 * i, Label::Normal, std::nullopt});
        t.rows.push_back({"a" + std::to_string(i), "A", 1.0 + i, Label::Anomalous, std::nullopt});
    }
    save_score_table(d.path / "t.csv", t);
    REQUIRE(run("evaluate " + (d / "t.csv") + " --normal N --out " + (d / "r.json")) == 0);
    const auto j = nlohmann::json::parse(slurp(d.path / "r.json"));
    CHECK(j.dump().find("\"balanced_accuracy\":1.0") != std::string::npos);
    CHECK(j.dump().find("\"f1\":1.0") != std::string::npos);
}

TEST_CASE("tau sweep emits one grid per tau") {
    const TempDir d("qvr_test_sweep");
    const std::string quick = "--preset blobs --set train.restarts=1 "
                              "--set train.optimizer.max_evaluations=10 "
                              "--set eval.sweep.tau.resolution=4 --set eval.sweep.tau.score_draws=2 ";
    REQUIRE(run(quick + "generate --out " + d.path.string()) == 0);
    REQUIRE(run(quick + "sweep tau " + (d / "blobs.csv") + " --out " + (d / "tau")) == 0);
    std::size_t grids = 0;
    for (const auto &e : fs::directory_iterator(d.path / "tau")) {
        grids += e.path().filename().string().rfind("tau_grid", 0) == 0 ? 1 : 0;
    }
    CHECK(grids == 8);
}
