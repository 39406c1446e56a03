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
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qvr {

enum class Label { Unknown, Normal, Anomalous };

[[nodiscard]] std::string_view to_string(Label label) noexcept;
/// Accepts normal/anomalous/unknown (also 0/1); throws DataError otherwise.
[[nodiscard]] Label parse_label(std::string_view text);

/// A d-dimensional real series sampled at p strictly increasing times.
struct TimeSeries {
    std::string id;
    std::vector<double> times;
    std::vector<double> values; ///< p x d, row-major
    std::size_t features = 1;
    Label label = Label::Unknown;
    /// Optional per-series metadata (USD value of the associated transaction).
    std::optional<double> value_usd;

    [[nodiscard]] std::size_t points() const noexcept { return times.size(); }
    [[nodiscard]] std::span<const double> point(std::size_t j) const {
        return {values.data() + j * features, features};
    }
    [[nodiscard]] double &at(std::size_t j, std::size_t f) { return values[j * features + f]; }
    [[nodiscard]] double at(std::size_t j, std::size_t f) const {
        return values[j * features + f];
    }

    /// Throws DataError on shape mismatch, non-monotone times or NaN values.
    void validate() const;
};

/// A homogeneous collection of series sharing (p, d).
struct Dataset {
    std::string name;
    std::vector<TimeSeries> series;
    bool rescaled = false;

    [[nodiscard]] bool empty() const noexcept { return series.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return series.size(); }
    [[nodiscard]] std::size_t points() const noexcept {
        return series.empty() ? 0 : series.front().points();
    }
    [[nodiscard]] std::size_t features() const noexcept {
        return series.empty() ? 0 : series.front().features;
    }

    /// Homogeneous shapes and unique ids; throws DataError.
    void validate() const;
};

} // namespace qvr
