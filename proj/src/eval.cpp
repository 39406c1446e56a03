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
#include "qvr/eval.hpp"

#include "qvr/data.hpp"
#include "qvr/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string_view>

namespace qvr {

double balanced_accuracy(const Confusion &c) noexcept {
    const double tpr = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    const double tnr = c.tn + c.fp == 0 ? 0.0 : static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    return 0.5 * (tpr + tnr);
}

double f1(const Confusion &c) noexcept {
    const std::size_t denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

Confusion confusion_at(std::span<const double> normal_scores,
                       std::span<const double> anomalous_scores, double zeta) {
    Confusion c;
    for (double s : normal_scores) {
        (s > zeta ? c.fp : c.tn) += 1;
    }
    for (double s : anomalous_scores) {
        (s > zeta ? c.tp : c.fn) += 1;
    }
    return c;
}

ThresholdResult evaluate_threshold(std::span<const double> normal_scores,
                                   std::span<const double> anomalous_scores, double zeta) {
    ThresholdResult r;
    r.zeta = zeta;
    r.confusion = confusion_at(normal_scores, anomalous_scores, zeta);
    r.balanced_accuracy = balanced_accuracy(r.confusion);
    r.f1 = f1(r.confusion);
    return r;
}

ThresholdResult tune_threshold(std::span<const double> normal_scores,
                               std::span<const double> anomalous_scores) {
    if (normal_scores.empty() || anomalous_scores.empty()) {
        throw ArgumentError("threshold tuning needs nonempty normal and anomalous score lists");
    }
    std::vector<double> normal(normal_scores.begin(), normal_scores.end());
    std::vector<double> anomalous(anomalous_scores.begin(), anomalous_scores.end());
    for (double s : normal) {
        if (!std::isfinite(s)) {
            throw ArgumentError("scores must be finite");
        }
    }
    for (double s : anomalous) {
        if (!std::isfinite(s)) {
            throw ArgumentError("scores must be finite");
        }
    }
    std::sort(normal.begin(), normal.end());
    std::sort(anomalous.begin(), anomalous.end());
    std::vector<double> all;
    all.reserve(normal.size() + anomalous.size());
    std::merge(normal.begin(), normal.end(), anomalous.begin(), anomalous.end(),
               std::back_inserter(all));
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::vector<double> candidates;
    candidates.reserve(all.size() + 1);
    candidates.push_back(-std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k + 1 < all.size(); ++k) {
        candidates.push_back(all[k] + 0.5 * (all[k + 1] - all[k]));
    }
    candidates.push_back(std::numeric_limits<double>::infinity());

    auto above = [](const std::vector<double> &v, double zeta) {
        return static_cast<std::size_t>(v.end() - std::upper_bound(v.begin(), v.end(), zeta));
    };
    ThresholdResult best;
    bool have = false;
    for (double zeta : candidates) {
        Confusion c;
        c.fp = above(normal, zeta);
        c.tn = normal.size() - c.fp;
        c.tp = above(anomalous, zeta);
        c.fn = anomalous.size() - c.tp;
        const double ab = balanced_accuracy(c);
        if (!have || ab > best.balanced_accuracy) {
            best = ThresholdResult{zeta, ab, f1(c), c};
            have = true;
        }
    }
    return best;
}

double close_call_fraction(std::span<const double> scores, double zeta, double delta) {
    if (scores.empty()) {
        return 0.0;
    }
    if (!(delta >= 0.0)) {
        throw ArgumentError("close-call delta must be >= 0");
    }
    std::size_t flips = 0;
    for (double s : scores) {
        const bool base = s > zeta;
        if ((s - delta > zeta) != base || (s + delta > zeta) != base) {
            ++flips;
        }
    }
    return static_cast<double>(flips) / static_cast<double>(scores.size());
}

std::vector<double> ScoreTable::scores_of(std::string_view dataset) const {
    std::vector<double> out;
    for (const auto &r : rows) {
        if (r.dataset == dataset) {
            out.push_back(r.score);
        }
    }
    return out;
}

std::vector<std::string> ScoreTable::datasets() const {
    std::vector<std::string> out;
    for (const auto &r : rows) {
        if (std::find(out.begin(), out.end(), r.dataset) == out.end()) {
            out.push_back(r.dataset);
        }
    }
    return out;
}

void write_score_table(std::ostream &out, const ScoreTable &table) {
    if (!table.config_hash.empty()) {
        out << "# config_hash=" << table.config_hash << '\n';
    }
    const bool has_usd = std::any_of(table.rows.begin(), table.rows.end(),
                                     [](const ScoreRow &r) { return r.value_usd.has_value(); });
    out << "series_id,dataset,score,label";
    if (has_usd) {
        out << ",value_usd";
    }
    out << '\n';
    for (const auto &r : table.rows) {
        out << r.series_id << ',' << r.dataset << ',' << format_double(r.score) << ','
            << to_string(r.label);
        if (has_usd) {
            out << ',';
            if (r.value_usd) {
                out << format_double(*r.value_usd);
            }
        }
        out << '\n';
    }
}

void save_score_table(const std::filesystem::path &path, const ScoreTable &table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    write_score_table(out, table);
}

namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
        s.remove_suffix(1);
    }
    while (!s.empty() && s.front() == ' ') {
        s.remove_prefix(1);
    }
    return s;
}

std::vector<std::string_view> fields_of(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(strip(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) {
            return out;
        }
        start = comma + 1;
    }
}

double number(std::string_view s, std::size_t row) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError("score table row " + std::to_string(row) + ": cannot parse '" +
                        std::string(s) + "' as a number");
    }
    return v;
}

} // namespace

ScoreTable read_score_table(std::istream &in) {
    ScoreTable table;
    std::string line;
    std::size_t row = 0;
    bool header = false;
    bool has_usd = false;
    while (std::getline(in, line)) {
        ++row;
        const auto body = strip(line);
        if (body.empty()) {
            continue;
        }
        if (body.front() == '#') {
            constexpr std::string_view key = "# config_hash=";
            if (body.substr(0, key.size()) == key) {
                table.config_hash = std::string(body.substr(key.size()));
            }
            continue;
        }
        const auto f = fields_of(body);
        if (!header) {
            if (f.size() < 4 || f[0] != "series_id" || f[1] != "dataset" || f[2] != "score" ||
                f[3] != "label" || f.size() > 5 || (f.size() == 5 && f[4] != "value_usd")) {
                throw DataError(
                    "score table header must be series_id,dataset,score,label[,value_usd]");
            }
            has_usd = f.size() == 5;
            header = true;
            continue;
        }
        if (f.size() != (has_usd ? 5U : 4U)) {
            throw DataError("score table row " + std::to_string(row) + ": wrong field count");
        }
        ScoreRow r;
        r.series_id = std::string(f[0]);
        r.dataset = std::string(f[1]);
        r.score = number(f[2], row);
        if (!std::isfinite(r.score) || r.score < 0.0) {
            throw DataError("score table row " + std::to_string(row) +
                            ": score must be finite and >= 0");
        }
        try {
            r.label = parse_label(f[3]);
        } catch (const DataError &e) {
            throw DataError("score table row " + std::to_string(row) + ": " + e.what());
        }
        if (has_usd && !f[4].empty()) {
            r.value_usd = number(f[4], row);
        }
        table.rows.push_back(std::move(r));
    }
    if (!header) {
        throw DataError("score table has no header row");
    }
    return table;
}

ScoreTable load_score_table(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    return read_score_table(in);
}

ScoreTable make_score_table(const Dataset &data, std::span<const double> scores,
                            std::string config_hash) {
    if (scores.size() != data.size()) {
        throw ArgumentError("one score per series expected");
    }
    ScoreTable table;
    table.config_hash = std::move(config_hash);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto &s = data.series[i];
        table.rows.push_back(ScoreRow{s.id, data.name, scores[i], s.label, s.value_usd});
    }
    return table;
}

std::vector<DetectionWindow> detection_probability(std::span<const ScoreRow> rows, double zeta,
                                                   std::size_t width, std::size_t step) {
    if (width < 1 || step < 1) {
        throw ArgumentError("window width and step must be >= 1");
    }
    std::vector<const ScoreRow *> valued;
    for (const auto &r : rows) {
        if (r.value_usd) {
            valued.push_back(&r);
        }
    }
    std::stable_sort(valued.begin(), valued.end(), [](const ScoreRow *a, const ScoreRow *b) {
        return *a->value_usd < *b->value_usd;
    });
    std::vector<DetectionWindow> out;
    for (std::size_t start = 0; start + width <= valued.size(); start += step) {
        DetectionWindow w;
        w.start = start;
        w.min_value = *valued[start]->value_usd;
        w.max_value = *valued[start + width - 1]->value_usd;
        double sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t k = start; k < start + width; ++k) {
            sum += *valued[k]->value_usd;
            hits += valued[k]->score > zeta ? 1 : 0;
        }
        w.mean_value = sum / static_cast<double>(width);
        w.detection_probability = static_cast<double>(hits) / static_cast<double>(width);
        out.push_back(w);
    }
    return out;
}

RankTest mann_whitney(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw ArgumentError("rank test needs two nonempty samples");
    }
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(n);
    for (double v : a) {
        pooled.emplace_back(v, 0);
    }
    for (double v : b) {
        pooled.emplace_back(v, 1);
    }
    std::sort(pooled.begin(), pooled.end());
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) {
            ++j;
        }
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].second == 0) {
                rank_sum_a += avg_rank;
            }
        }
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const auto n1 = static_cast<double>(a.size());
    const auto n2 = static_cast<double>(b.size());
    const auto nn = static_cast<double>(n);
    RankTest r;
    r.u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    const double mean = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (!(var > 0.0)) {
        return RankTest{r.u, 0.0, 1.0};
    }
    const double diff = r.u - mean;
    const double corrected = std::max(0.0, std::abs(diff) - 0.5);
    r.z = std::copysign(corrected / std::sqrt(var), diff);
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    return r;
}

} // namespace qvr
