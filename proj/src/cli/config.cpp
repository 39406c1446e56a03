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
#include "cli/config.hpp"

#include "qvr/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

extern char **environ;

namespace qvr::cli {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json range(double lo, double hi) { return json::array({lo, hi}); }

json base_document() {
    json d;
    d["preset"] = "didactic";
    d["seed"] = std::uint64_t{1};
    d["threads"] = 0;
    d["data"] = {
        {"train", ""},
        {"rescale", false},
        {"series", std::size_t{50}},
        {"points", std::size_t{50}},
        {"noise_std", 0.1},
        {"spikes",
         {{"rate", 0.04},
          {"min_duration", std::size_t{1}},
          {"max_duration", std::size_t{4}},
          {"min_amplitude", 0.5},
          {"max_amplitude", 3.0},
          {"min_spikes", std::size_t{1}}}},
        {"sinusoid_train", std::size_t{100}},
        {"sinusoid_test", std::size_t{50}},
        {"sinusoid_offset_std", 0.1},
        {"sinusoid_anomalous_offset_std", 0.5},
        {"blob_count", std::size_t{100}},
        {"blob_std", kPi / 4.0},
        {"blob_centre", json::array({1.5 * kPi, 1.5 * kPi})},
    };
    d["ansatz"] = {{"qubits", std::size_t{2}}, {"layers", std::size_t{1}}, {"cost_scale", 4.0}};
    d["train"] = {
        {"n_x", std::size_t{5}},
        {"n_t", std::size_t{10}},
        {"n_e", std::size_t{10}},
        {"tau", 5.0},
        {"restarts", std::size_t{20}},
        {"ref_draws", std::size_t{100}},
        {"optimizer",
         {{"method", "powell"},
          {"max_evaluations", std::size_t{1000}},
          {"cost_tolerance", 0.0},
          {"initial_step", 0.5},
          {"line_tolerance", 1e-3},
          {"max_line_step", 10.0}}},
        {"init",
         {{"alpha", range(0.0, 2.0 * kPi)},
          {"mu", range(-1.0, 1.0)},
          {"sigma", range(0.0, 0.5)},
          {"eta0", range(-1.0, 1.0)}}},
    };
    d["eval"] = {
        {"score_draws", std::size_t{100}},
        {"normal", "F"},
        {"close_call_delta", 1e-3},
        {"window", std::size_t{285}},
        {"step", std::size_t{1}},
        {"grid",
         {{"t_min", 0.0},
          {"t_max", 49.0},
          {"t_count", std::size_t{50}},
          {"x_min", -kPi},
          {"x_max", kPi},
          {"x_count", std::size_t{64}},
          {"resolution", std::size_t{64}},
          {"t_static", 1.0}}},
        {"sweep",
         {{"ne",
           {{"thetas", std::size_t{6}},
            {"n_x", json::array({1, 5, 10})},
            {"n_e", json::array({1, 2, 5, 10, 20, 50, 100})},
            {"n_t", std::size_t{10}},
            {"repeats", std::size_t{100}}}},
          {"musigma",
           {{"mu_min", -3.0},
            {"mu_max", 3.0},
            {"mu_count", std::size_t{61}},
            {"sigma", json::array({0.0, 0.1, 0.5, 1.0})},
            {"repeats", std::size_t{100}}}},
          {"tau",
           {{"taus", json::array({0.5, 1.0, 3.0, 5.0, 6.0, 8.0, 10.0, 20.0})},
            {"resolution", std::size_t{64}},
            {"level", 0.01},
            {"score_draws", std::size_t{100}}}},
          {"optimizers",
           {{"methods", json::array({"powell", "nelder-mead"})},
            {"restarts", std::size_t{100}}}}}},
    };
    return d;
}

const char *type_name(const json &j) {
    if (j.is_boolean()) {
        return "boolean";
    }
    if (j.is_number_unsigned()) {
        return "non-negative integer";
    }
    if (j.is_number_integer()) {
        return "integer";
    }
    if (j.is_number()) {
        return "number";
    }
    if (j.is_string()) {
        return "string";
    }
    if (j.is_array()) {
        return "array";
    }
    if (j.is_object()) {
        return "object";
    }
    return "null";
}

json coerce(const json &base, const json &value, const std::string &path,
            const std::string &where) {
    auto fail = [&]() -> json {
        throw ConfigError(where + ": '" + path + "' expects " + type_name(base) + ", got " +
                          value.dump());
    };
    if (base.is_number_unsigned()) {
        if (value.is_number_unsigned()) {
            return value;
        }
        if (value.is_number_integer() && value.get<long long>() >= 0) {
            return json(value.get<std::uint64_t>());
        }
        if (value.is_number_float()) {
            const double v = value.get<double>();
            if (v >= 0.0 && v == static_cast<double>(static_cast<std::uint64_t>(v))) {
                return json(static_cast<std::uint64_t>(v));
            }
        }
        return fail();
    }
    if (base.is_number_integer()) {
        return value.is_number_integer() ? value : fail();
    }
    if (base.is_number_float()) {
        return value.is_number() ? json(value.get<double>()) : fail();
    }
    if (base.type() != value.type()) {
        return fail();
    }
    return value;
}

void merge_into(json &base, const json &patch, const std::string &prefix,
                const std::string &where) {
    if (!patch.is_object()) {
        throw ConfigError(where + ": expected an object at '" + (prefix.empty() ? "<root>" : prefix) +
                          "'");
    }
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!base.contains(it.key())) {
            throw ConfigError(where + ": unknown key '" + path + "'");
        }
        json &slot = base[it.key()];
        if (slot.is_object()) {
            merge_into(slot, it.value(), path, where);
        } else {
            slot = coerce(slot, it.value(), path, where);
        }
    }
}

json parse_raw(std::string_view raw) {
    try {
        return json::parse(raw);
    } catch (const json::exception &) {
        return json(std::string(raw));
    }
}

bool match_env(const json &node, std::string_view rest, std::vector<std::string> &path) {
    if (rest.empty()) {
        return !node.is_object();
    }
    if (!node.is_object()) {
        return false;
    }
    for (auto it = node.begin(); it != node.end(); ++it) {
        const std::string &key = it.key();
        if (rest.size() < key.size() || rest.substr(0, key.size()) != key) {
            continue;
        }
        std::string_view tail = rest.substr(key.size());
        if (!tail.empty()) {
            if (tail.front() != '_') {
                continue;
            }
            tail.remove_prefix(1);
        }
        path.push_back(key);
        if (match_env(it.value(), tail, path)) {
            return true;
        }
        path.pop_back();
    }
    return false;
}

template <typename T>
T get(const json &doc, const char *path) {
    const json *node = &doc;
    std::string_view p(path);
    while (!p.empty()) {
        const auto dot = p.find('.');
        const std::string key(p.substr(0, dot));
        if (!node->contains(key)) {
            throw ConfigError(std::string("missing config key '") + path + "'");
        }
        node = &node->at(key);
        p = dot == std::string_view::npos ? std::string_view{} : p.substr(dot + 1);
    }
    try {
        return node->get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config key '") + path + "': " + e.what());
    }
}

UniformRange get_range(const json &doc, const char *path) {
    const auto v = get<std::vector<double>>(doc, path);
    if (v.size() != 2 || !(v[0] <= v[1])) {
        throw ConfigError(std::string("config key '") + path + "' must be [lo, hi] with lo <= hi");
    }
    return UniformRange{v[0], v[1]};
}

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw ConfigError(what);
    }
}

} // namespace

std::vector<std::string> preset_names() {
    return {"didactic", "sinusoids", "blobs", "bivariate", "trivariate"};
}

std::string canonical_preset(std::string_view name) {
    if (name == "didactic" || name == "univariate") {
        return "didactic";
    }
    if (name == "blobs" || name == "static") {
        return "blobs";
    }
    if (name == "sinusoids" || name == "bivariate" || name == "trivariate") {
        return std::string(name);
    }
    throw ConfigError("unknown preset '" + std::string(name) +
                      "' (expected didactic|univariate, sinusoids, blobs|static, bivariate, "
                      "trivariate)");
}

json preset_document(std::string_view name) {
    const std::string preset = canonical_preset(name);
    json d = base_document();
    d["preset"] = preset;
    if (preset == "sinusoids") {
        d["ansatz"]["layers"] = std::size_t{3};
        d["train"]["tau"] = 20.0;
        d["train"]["restarts"] = std::size_t{5};
        d["train"]["optimizer"]["max_evaluations"] = std::size_t{200};
        d["eval"]["normal"] = "R";
        d["eval"]["grid"]["t_max"] = 50.0;
        d["eval"]["grid"]["t_count"] = std::size_t{51};
    } else if (preset == "blobs") {
        d["ansatz"]["layers"] = std::size_t{3};
        d["train"]["n_x"] = std::size_t{10};
        d["train"]["n_t"] = std::size_t{1};
        d["train"]["restarts"] = std::size_t{5};
        d["train"]["optimizer"]["max_evaluations"] = std::size_t{200};
        d["eval"]["normal"] = "blobs";
    } else if (preset == "bivariate" || preset == "trivariate") {
        d["ansatz"]["qubits"] = std::size_t{preset == "bivariate" ? 2U : 3U};
        d["ansatz"]["layers"] = std::size_t{3};
        d["data"]["rescale"] = true;
        d["train"]["n_x"] = std::size_t{10};
        d["train"]["n_t"] = std::size_t{10};
        d["train"]["n_e"] = std::size_t{10};
        d["train"]["restarts"] = std::size_t{5};
        d["train"]["optimizer"]["max_evaluations"] = std::size_t{2000};
        d["eval"]["normal"] = "N";
        d["eval"]["grid"]["t_min"] = -1.0;
        d["eval"]["grid"]["t_max"] = 2.0;
        d["eval"]["grid"]["t_count"] = std::size_t{180};
    }
    return d;
}

void merge_checked(json &base, const json &patch, const std::string &where) {
    merge_into(base, patch, "", where);
}

void set_path(json &doc, std::string_view dotted, std::string_view raw, const std::string &where) {
    json patch = parse_raw(raw);
    std::vector<std::string> keys;
    std::size_t start = 0;
    for (;;) {
        const auto dot = dotted.find('.', start);
        keys.emplace_back(dotted.substr(start, dot == std::string_view::npos ? dot : dot - start));
        if (dot == std::string_view::npos) {
            break;
        }
        start = dot + 1;
    }
    for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
        patch = json{{*it, patch}};
    }
    merge_checked(doc, patch, where);
}

void apply_env(json &doc, const std::map<std::string, std::string> &env) {
    for (const auto &[name, value] : env) {
        if (name.rfind(kEnvPrefix, 0) != 0) {
            continue;
        }
        if (name == "QVR_CONFIG" || name == "QVR_PRESET" || name == "QVR_CRYPTO_DIR") {
            continue;
        }
        std::string rest = name.substr(kEnvPrefix.size());
        std::transform(rest.begin(), rest.end(), rest.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        std::vector<std::string> path;
        if (!match_env(doc, rest, path)) {
            throw ConfigError("environment: " + name + " does not name a config key");
        }
        std::string dotted;
        for (const auto &k : path) {
            dotted += (dotted.empty() ? "" : ".") + k;
        }
        set_path(doc, dotted, value, "environment " + name);
    }
}

std::map<std::string, std::string> environment() {
    std::map<std::string, std::string> env;
    for (char **e = environ; e != nullptr && *e != nullptr; ++e) {
        const std::string_view entry(*e);
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) {
            continue;
        }
        const std::string key(entry.substr(0, eq));
        if (key.rfind(kEnvPrefix, 0) == 0) {
            env.emplace(key, std::string(entry.substr(eq + 1)));
        }
    }
    return env;
}

RunConfig resolve(const Overrides &flags, const std::map<std::string, std::string> &env) {
    std::optional<std::string> config_path = flags.config_path;
    if (!config_path) {
        if (const auto it = env.find("QVR_CONFIG"); it != env.end() && !it->second.empty()) {
            config_path = it->second;
        }
    }
    json file;
    if (config_path) {
        std::ifstream in(*config_path, std::ios::binary);
        if (!in) {
            throw ConfigError("cannot open config file '" + *config_path + "'");
        }
        try {
            file = json::parse(in);
        } catch (const json::exception &e) {
            throw ConfigError("config file '" + *config_path + "': " + e.what());
        }
        if (!file.is_object()) {
            throw ConfigError("config file '" + *config_path + "' must hold a JSON object");
        }
    }

    std::string preset = "didactic";
    if (file.contains("preset")) {
        if (!file["preset"].is_string()) {
            throw ConfigError("config file: 'preset' must be a string");
        }
        preset = file["preset"].get<std::string>();
    }
    if (const auto it = env.find("QVR_PRESET"); it != env.end() && !it->second.empty()) {
        preset = it->second;
    }
    if (flags.preset) {
        preset = *flags.preset;
    }
    preset = canonical_preset(preset);

    json doc = preset_document(preset);
    if (!file.is_null()) {
        file.erase("preset");
        merge_checked(doc, file, "config file '" + *config_path + "'");
    }
    apply_env(doc, env);
    for (const auto &a : flags.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--set expects key=value, got '" + a + "'");
        }
        set_path(doc, std::string_view(a).substr(0, eq), std::string_view(a).substr(eq + 1),
                 "--set " + a.substr(0, eq));
    }
    if (flags.seed) {
        doc["seed"] = *flags.seed;
    }
    if (flags.threads) {
        doc["threads"] = *flags.threads;
    }
    return from_document(doc);
}

RunConfig from_document(const json &doc) {
    RunConfig c;
    c.document = doc;
    c.preset = canonical_preset(get<std::string>(doc, "preset"));
    c.seed = get<std::uint64_t>(doc, "seed");
    c.threads = get<int>(doc, "threads");
    require(c.threads >= 0, "threads must be >= 0 (0 = OpenMP default)");

    DataSettings &d = c.data;
    d.train = get<std::string>(doc, "data.train");
    d.rescale = get<bool>(doc, "data.rescale");
    d.series = get<std::size_t>(doc, "data.series");
    d.points = get<std::size_t>(doc, "data.points");
    d.noise_std = get<double>(doc, "data.noise_std");
    d.spikes.rate = get<double>(doc, "data.spikes.rate");
    d.spikes.min_duration = get<std::size_t>(doc, "data.spikes.min_duration");
    d.spikes.max_duration = get<std::size_t>(doc, "data.spikes.max_duration");
    d.spikes.min_amplitude = get<double>(doc, "data.spikes.min_amplitude");
    d.spikes.max_amplitude = get<double>(doc, "data.spikes.max_amplitude");
    d.spikes.min_spikes = get<std::size_t>(doc, "data.spikes.min_spikes");
    d.sinusoid_train = get<std::size_t>(doc, "data.sinusoid_train");
    d.sinusoid_test = get<std::size_t>(doc, "data.sinusoid_test");
    d.sinusoid_offset_std = get<double>(doc, "data.sinusoid_offset_std");
    d.sinusoid_anomalous_offset_std = get<double>(doc, "data.sinusoid_anomalous_offset_std");
    d.blob_count = get<std::size_t>(doc, "data.blob_count");
    d.blob_std = get<double>(doc, "data.blob_std");
    const auto centre = get<std::vector<double>>(doc, "data.blob_centre");
    require(centre.size() == 2, "data.blob_centre must have two entries");
    d.blob_centre = {centre[0], centre[1]};
    require(d.series >= 1 && d.points >= 1, "data.series and data.points must be >= 1");
    require(d.noise_std >= 0.0, "data.noise_std must be >= 0");
    require(d.sinusoid_offset_std >= 0.0 && d.sinusoid_anomalous_offset_std >= 0.0,
            "sinusoid offset stds must be >= 0");
    require(d.blob_std >= 0.0 && d.blob_count >= 1, "blob_std must be >= 0 and blob_count >= 1");
    d.spikes.validate();

    TrainConfig &t = c.train;
    t.qubits = get<std::size_t>(doc, "ansatz.qubits");
    t.layers = get<std::size_t>(doc, "ansatz.layers");
    t.cost_scale = get<double>(doc, "ansatz.cost_scale");
    t.batch_series = get<std::size_t>(doc, "train.n_x");
    t.batch_times = get<std::size_t>(doc, "train.n_t");
    t.draws = get<std::size_t>(doc, "train.n_e");
    t.tau = get<double>(doc, "train.tau");
    t.restarts = get<std::size_t>(doc, "train.restarts");
    t.ref_draws = get<std::size_t>(doc, "train.ref_draws");
    t.base_seed = c.seed;
    t.init.alpha = get_range(doc, "train.init.alpha");
    t.init.mu = get_range(doc, "train.init.mu");
    t.init.sigma = get_range(doc, "train.init.sigma");
    t.init.eta0 = get_range(doc, "train.init.eta0");
    require(t.qubits >= 1 && t.qubits <= 12, "ansatz.qubits must be in [1, 12]");
    require(t.layers >= 1, "ansatz.layers must be >= 1");
    require(t.cost_scale > 0.0, "ansatz.cost_scale must be positive");
    require(t.batch_series >= 1 && t.batch_times >= 1 && t.draws >= 1 && t.ref_draws >= 1,
            "train.n_x, n_t, n_e and ref_draws must be >= 1");
    require(t.tau >= 0.0, "train.tau must be >= 0");
    require(t.restarts >= 1, "train.restarts must be >= 1");

    OptimizerSpec &o = c.optimizer;
    o.method = parse_method(get<std::string>(doc, "train.optimizer.method"));
    o.max_evaluations = get<std::size_t>(doc, "train.optimizer.max_evaluations");
    o.cost_tolerance = get<double>(doc, "train.optimizer.cost_tolerance");
    o.initial_step = get<double>(doc, "train.optimizer.initial_step");
    o.line_tolerance = get<double>(doc, "train.optimizer.line_tolerance");
    o.max_line_step = get<double>(doc, "train.optimizer.max_line_step");
    o.validate();

    EvalSettings &e = c.eval;
    e.score_draws = get<std::size_t>(doc, "eval.score_draws");
    e.normal = get<std::string>(doc, "eval.normal");
    e.close_call_delta = get<double>(doc, "eval.close_call_delta");
    e.window = get<std::size_t>(doc, "eval.window");
    e.step = get<std::size_t>(doc, "eval.step");
    require(e.score_draws >= 1, "eval.score_draws must be >= 1");
    require(e.close_call_delta >= 0.0, "eval.close_call_delta must be >= 0");
    require(e.window >= 1 && e.step >= 1, "eval.window and eval.step must be >= 1");
    GridSettings &g = e.grid;
    g.t_min = get<double>(doc, "eval.grid.t_min");
    g.t_max = get<double>(doc, "eval.grid.t_max");
    g.t_count = get<std::size_t>(doc, "eval.grid.t_count");
    g.x_min = get<double>(doc, "eval.grid.x_min");
    g.x_max = get<double>(doc, "eval.grid.x_max");
    g.x_count = get<std::size_t>(doc, "eval.grid.x_count");
    g.resolution = get<std::size_t>(doc, "eval.grid.resolution");
    g.t_static = get<double>(doc, "eval.grid.t_static");
    require(g.t_count >= 1 && g.x_count >= 1 && g.resolution >= 1, "grid sizes must be >= 1");
    require(g.t_min <= g.t_max && g.x_min <= g.x_max, "grid ranges need min <= max");

    SweepSettings &s = e.sweep;
    s.ne_thetas = get<std::size_t>(doc, "eval.sweep.ne.thetas");
    s.ne.n_x = get<std::vector<std::size_t>>(doc, "eval.sweep.ne.n_x");
    s.ne.n_e = get<std::vector<std::size_t>>(doc, "eval.sweep.ne.n_e");
    s.ne.n_t = get<std::size_t>(doc, "eval.sweep.ne.n_t");
    s.ne.repeats = get<std::size_t>(doc, "eval.sweep.ne.repeats");
    s.ne.tau = t.tau;
    s.ne.seed = c.seed;
    require(s.ne.repeats >= 2, "eval.sweep.ne.repeats must be >= 2");
    s.mu_min = get<double>(doc, "eval.sweep.musigma.mu_min");
    s.mu_max = get<double>(doc, "eval.sweep.musigma.mu_max");
    s.mu_count = get<std::size_t>(doc, "eval.sweep.musigma.mu_count");
    require(s.mu_count >= 1 && s.mu_min <= s.mu_max, "musigma grid needs mu_count >= 1, min <= max");
    s.musigma.mu.clear();
    for (std::size_t k = 0; k < s.mu_count; ++k) {
        s.musigma.mu.push_back(s.mu_count == 1 ? s.mu_min
                                               : s.mu_min + (s.mu_max - s.mu_min) *
                                                                static_cast<double>(k) /
                                                                static_cast<double>(s.mu_count - 1));
    }
    s.musigma.sigma = get<std::vector<double>>(doc, "eval.sweep.musigma.sigma");
    s.musigma.repeats = get<std::size_t>(doc, "eval.sweep.musigma.repeats");
    s.musigma.n_x = t.batch_series;
    s.musigma.n_t = t.batch_times;
    s.musigma.n_e = t.draws;
    s.musigma.tau = t.tau;
    s.musigma.seed = c.seed;
    s.tau.taus = get<std::vector<double>>(doc, "eval.sweep.tau.taus");
    s.tau.resolution = get<std::size_t>(doc, "eval.sweep.tau.resolution");
    s.tau.level = get<double>(doc, "eval.sweep.tau.level");
    s.tau.score_draws = get<std::size_t>(doc, "eval.sweep.tau.score_draws");
    for (double tau : s.tau.taus) {
        require(tau >= 0.0, "eval.sweep.tau.taus entries must be >= 0");
    }
    s.methods.clear();
    for (const auto &m : get<std::vector<std::string>>(doc, "eval.sweep.optimizers.methods")) {
        s.methods.push_back(parse_method(m));
    }
    s.optimizer_restarts = get<std::size_t>(doc, "eval.sweep.optimizers.restarts");
    require(s.optimizer_restarts >= 1, "eval.sweep.optimizers.restarts must be >= 1");

    c.hash = config_hash(doc);
    return c;
}

std::string config_hash(const json &doc) {
    json copy = doc;
    copy.erase("threads");
    const std::string text = copy.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qvr::cli
