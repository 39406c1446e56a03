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
 * Threshold tuning, classification metrics and score tables.
 *
 * A series is predicted anomalous iff its score is strictly greater than the
 * threshold zeta.
 */
#pragma once

#include "qvr/timeseries.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qvr {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp + fp + tn + fn; }
    bool operator==(const Confusion &) const = default;
};

/// Zero-denominator recall terms contribute 0.
[[nodiscard]] double balanced_accuracy(const Confusion &c) noexcept;
/// Returns 0 when 2tp + fp + fn is zero.
[[nodiscard]] double f1(const Confusion &c) noexcept;

[[nodiscard]] Confusion confusion_at(std::span<const double> normal_scores,
                                     std::span<const double> anomalous_scores, double zeta);

struct ThresholdResult {
    double zeta = 0.0;
    double balanced_accuracy = 0.0;
    double f1 = 0.0;
    Confusion confusion;
};

/// Candidates are midpoints of adjacent sorted unique scores plus -inf/+inf;
/// ties in balanced accuracy go to the smaller zeta.
[[nodiscard]] ThresholdResult tune_threshold(std::span<const double> normal_scores,
                                             std::span<const double> anomalous_scores);

[[nodiscard]] ThresholdResult evaluate_threshold(std::span<const double> normal_scores,
                                                 std::span<const double> anomalous_scores,
                                                 double zeta);

/// Fraction of scores whose prediction flips when moved by +-delta.
[[nodiscard]] double close_call_fraction(std::span<const double> scores, double zeta,
                                         double delta);

struct ScoreRow {
    std::string series_id;
    std::string dataset;
    double score = 0.0;
    Label label = Label::Unknown;
    std::optional<double> value_usd;
};

struct ScoreTable {
    std::vector<ScoreRow> rows;
    std::string config_hash;

    [[nodiscard]] std::vector<double> scores_of(std::string_view dataset) const;
    [[nodiscard]] std::vector<std::string> datasets() const; ///< first-appearance order
};

/// Header `series_id,dataset,score,label[,value_usd]`, preceded by a
/// `# config_hash=...` comment line when the hash is set.
void write_score_table(std::ostream &out, const ScoreTable &table);
void save_score_table(const std::filesystem::path &path, const ScoreTable &table);
[[nodiscard]] ScoreTable read_score_table(std::istream &in);
[[nodiscard]] ScoreTable load_score_table(const std::filesystem::path &path);

[[nodiscard]] ScoreTable make_score_table(const Dataset &data, std::span<const double> scores,
                                          std::string config_hash = "");

struct DetectionWindow {
    std::size_t start = 0;
    double min_value = 0.0;
    double max_value = 0.0;
    double mean_value = 0.0;
    double detection_probability = 0.0;
};

/// Sorts rows by value_usd and slides a window of `width` rows with step
/// `step`, reporting the fraction predicted anomalous in each window. Rows
/// without value_usd are skipped; returns nothing when fewer than `width`
/// rows remain.
[[nodiscard]] std::vector<DetectionWindow> detection_probability(std::span<const ScoreRow> rows,
                                                                 double zeta,
                                                                 std::size_t width = 285,
                                                                 std::size_t step = 1);

struct RankTest {
    double u = 0.0;       ///< Mann-Whitney U of the first sample
    double z = 0.0;       ///< tie-corrected normal approximation
    double p_value = 1.0; ///< two-sided
};

[[nodiscard]] RankTest mann_whitney(std::span<const double> a, std::span<const double> b);

} // namespace qvr
